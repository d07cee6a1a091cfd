#include "gvcsr/setcoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>

#include "gvcsr/gvcd.hpp"
#include "gvcsr/rng.hpp"

namespace gvcsr {

namespace {

constexpr int kThumb = 64;

Eigen::MatrixXd box_downsample(const GrayImage& img) {
    Eigen::MatrixXd out(kThumb, kThumb);
    for (int i = 0; i < kThumb; ++i) {
        int r0 = static_cast<int>(static_cast<long long>(i) * img.height / kThumb);
        int r1 = static_cast<int>(static_cast<long long>(i + 1) * img.height / kThumb);
        if (r1 <= r0) r1 = r0 + 1;
        for (int j = 0; j < kThumb; ++j) {
            int c0 = static_cast<int>(static_cast<long long>(j) * img.width / kThumb);
            int c1 = static_cast<int>(static_cast<long long>(j + 1) * img.width / kThumb);
            if (c1 <= c0) c1 = c0 + 1;
            double sum = 0.0;
            for (int r = r0; r < r1; ++r)
                for (int c = c0; c < c1; ++c) sum += img.at(std::min(r, img.height - 1), std::min(c, img.width - 1));
            out(i, j) = sum / (static_cast<double>(r1 - r0) * (c1 - c0));
        }
    }
    return out;
}

}  // namespace

double similarity(const GrayImage& a, const GrayImage& b) {
    Eigen::MatrixXd da = box_downsample(a), db = box_downsample(b);
    return (da - db).squaredNorm() / static_cast<double>(kThumb * kThumb);
}

MstResult build_mst(const Eigen::MatrixXd& distances) {
    auto k = static_cast<int>(distances.rows());
    if (k < 1 || distances.cols() != k) throw std::invalid_argument("build_mst: square distance matrix required");

    MstResult res;
    // Root: smallest total distance to all others, lowest index on ties.
    int root = 0;
    double best_total = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        double total = distances.row(i).sum();
        if (total < best_total) {
            best_total = total;
            root = i;
        }
    }
    res.root = root;
    res.parent.assign(static_cast<std::size_t>(k), -1);

    std::vector<bool> in_tree(static_cast<std::size_t>(k), false);
    std::vector<double> key(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
    std::vector<int> via(static_cast<std::size_t>(k), -1);
    key[static_cast<std::size_t>(root)] = 0.0;

    for (int step = 0; step < k; ++step) {
        int u = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int v = 0; v < k; ++v) {
            if (in_tree[static_cast<std::size_t>(v)]) continue;
            if (key[static_cast<std::size_t>(v)] < best) {  // strict < keeps the lowest index on ties
                best = key[static_cast<std::size_t>(v)];
                u = v;
            }
        }
        in_tree[static_cast<std::size_t>(u)] = true;
        res.parent[static_cast<std::size_t>(u)] = via[static_cast<std::size_t>(u)];
        for (int v = 0; v < k; ++v) {
            if (in_tree[static_cast<std::size_t>(v)]) continue;
            double w = distances(u, v);
            if (w < key[static_cast<std::size_t>(v)]) {
                key[static_cast<std::size_t>(v)] = w;
                via[static_cast<std::size_t>(v)] = u;
            }
        }
    }
    return res;
}

GrayImage reference_transform(const GrayImage& img) { return img; }

std::uint64_t retrain_seed(const GrayImage& decoded_parent) {
    std::uint32_t dims[2] = {static_cast<std::uint32_t>(decoded_parent.width),
                             static_cast<std::uint32_t>(decoded_parent.height)};
    std::uint64_t h = fnv1a64(dims, sizeof(dims));
    return fnv1a64(decoded_parent.pixels.data(), decoded_parent.pixels.size(), h);
}

namespace {

constexpr std::uint16_t kGvcsVersion = 1;
constexpr std::uint8_t kSimilarityDownsampledMse = 0;
constexpr std::uint8_t kTransformIdentity = 0;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Cursor {
    const std::uint8_t* p;
    std::size_t left;
    void need(std::size_t n) const {
        if (left < n) throw integrity_error("GVCS: truncated");
    }
    std::uint8_t u8() {
        need(1);
        std::uint8_t v = *p;
        ++p;
        --left;
        return v;
    }
    std::uint16_t u16() {
        need(2);
        auto v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        left -= 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
        p += 4;
        left -= 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
        p += 8;
        left -= 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(p), n);
        p += n;
        left -= n;
        return s;
    }
};

struct ManifestEntry {
    std::int32_t parent = -1;
    std::uint64_t offset = 0, length = 0;
    std::uint32_t dict_hash = 0;
    std::string name;
};

// Child dictionary from a decoded reference: transform hook, patch
// extraction, seeded learning. Shared verbatim by encoder and decoder.
Dictionary train_from_reference(const GrayImage& decoded_parent, const SetParams& params) {
    GrayImage ref = reference_transform(decoded_parent);
    PatchGrid grid = to_patches(ref, params.patch_size);
    LearnParams lp;
    lp.sparse = params.retrain_sparse;
    lp.outer_iters = params.retrain_outer_iters;
    lp.kappa = params.kappa;
    lp.seed = retrain_seed(decoded_parent);
    auto m = static_cast<Eigen::Index>(std::llround(params.retrain_gamma * params.patch_size * params.patch_size));
    return learn(grid.residuals, m, lp).dictionary;
}

std::vector<std::uint8_t> serialize_params_header(const SetParams& p) {
    std::vector<std::uint8_t> out;
    out.push_back(kSimilarityDownsampledMse);
    out.push_back(kTransformIdentity);
    put_u16(out, static_cast<std::uint16_t>(p.patch_size));
    put_f64(out, p.retrain_gamma);
    put_u32(out, static_cast<std::uint32_t>(p.retrain_outer_iters));
    put_f64(out, p.kappa);
    put_f64(out, p.retrain_sparse.alpha);
    put_f64(out, p.retrain_sparse.beta);
    put_f64(out, p.retrain_sparse.mu0);
    put_f64(out, p.retrain_sparse.mu_max);
    put_f64(out, p.retrain_sparse.rho);
    put_f64(out, p.retrain_sparse.eps);
    put_u32(out, static_cast<std::uint32_t>(p.retrain_sparse.max_iters));
    return out;
}

SetParams parse_params_header(Cursor& cur) {
    SetParams p;
    if (cur.u8() != kSimilarityDownsampledMse) throw integrity_error("GVCS: unknown similarity method");
    if (cur.u8() != kTransformIdentity) throw integrity_error("GVCS: unknown reference transform");
    p.patch_size = cur.u16();
    p.retrain_gamma = cur.f64();
    p.retrain_outer_iters = cur.u32();
    p.kappa = cur.f64();
    p.retrain_sparse.alpha = cur.f64();
    p.retrain_sparse.beta = cur.f64();
    p.retrain_sparse.mu0 = cur.f64();
    p.retrain_sparse.mu_max = cur.f64();
    p.retrain_sparse.rho = cur.f64();
    p.retrain_sparse.eps = cur.f64();
    p.retrain_sparse.max_iters = cur.u32();
    return p;
}

}  // namespace

SetEncodeResult encode_set(const std::vector<GrayImage>& images,
                           const std::vector<std::string>& names,
                           const Dictionary& global_dict, const SetParams& params) {
    if (images.empty()) throw std::invalid_argument("encode_set: empty image set");
    if (!names.empty() && names.size() != images.size())
        throw std::invalid_argument("encode_set: name/image count mismatch");

    auto k = static_cast<int>(images.size());
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) dist(i, j) = dist(j, i) = similarity(images[i], images[j]);

    SetEncodeResult res;
    res.mst = build_mst(dist);
    res.dict_hashes.resize(images.size());
    res.stats.resize(images.size());
    res.reconstructions.resize(images.size());

    std::vector<std::vector<int>> children(images.size());
    for (int i = 0; i < k; ++i)
        if (res.mst.parent[static_cast<std::size_t>(i)] >= 0)
            children[static_cast<std::size_t>(res.mst.parent[static_cast<std::size_t>(i)])].push_back(i);

    // Encode in topological (BFS) order so each child sees its parent's
    // decoded pixels.
    std::vector<std::vector<std::uint8_t>> streams(images.size());
    std::deque<int> queue{res.mst.root};
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        auto idx = static_cast<std::size_t>(id);
        Dictionary dict =
            res.mst.parent[idx] < 0
                ? global_dict
                : train_from_reference(res.reconstructions[static_cast<std::size_t>(res.mst.parent[idx])], params);
        EncodeResult enc = encode_image(images[idx], dict, params.coder, params.quant);
        streams[idx] = enc.bitstream.serialize();
        res.reconstructions[idx] = std::move(enc.reconstruction);
        res.dict_hashes[idx] = enc.bitstream.header.dict_hash;
        res.stats[idx].bpp = static_cast<double>(8 * streams[idx].size()) /
                             (static_cast<double>(images[idx].width) * images[idx].height);
        res.stats[idx].psnr = psnr(images[idx], res.reconstructions[idx]);
        for (int c : children[idx]) queue.push_back(c);
    }

    // Header + manifest, then streams in id order.
    std::vector<std::uint8_t>& out = res.archive;
    out = {'G', 'V', 'C', 'S'};
    put_u16(out, kGvcsVersion);
    auto ph = serialize_params_header(params);
    out.insert(out.end(), ph.begin(), ph.end());
    put_u32(out, static_cast<std::uint32_t>(images.size()));

    std::vector<std::size_t> offset_field(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::string name = names.empty() ? "image" + std::to_string(i) : names[i];
        put_u32(out, static_cast<std::uint32_t>(i));
        put_u32(out, static_cast<std::uint32_t>(res.mst.parent[i]));  // -1 wraps, read back as i32
        offset_field[i] = out.size();
        put_u64(out, 0);  // patched once stream positions are known
        put_u64(out, streams[i].size());
        put_u32(out, res.dict_hashes[i]);
        put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::uint64_t offset = out.size();
        for (int b = 0; b < 8; ++b) out[offset_field[i] + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(offset >> (8 * b));
        out.insert(out.end(), streams[i].begin(), streams[i].end());
    }
    return res;
}

SetDecodeResult decode_set(const std::vector<std::uint8_t>& archive, const Dictionary& global_dict) {
    if (archive.size() < 4 || std::memcmp(archive.data(), "GVCS", 4) != 0)
        throw integrity_error("GVCS: bad magic");
    Cursor cur{archive.data() + 4, archive.size() - 4};
    if (cur.u16() != kGvcsVersion) throw integrity_error("GVCS: unsupported version");
    SetParams params = parse_params_header(cur);
    std::uint32_t count = cur.u32();
    if (count == 0) throw integrity_error("GVCS: empty archive");

    std::vector<ManifestEntry> manifest(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t id = cur.u32();
        if (id != i) throw integrity_error("GVCS: manifest out of order");
        ManifestEntry& e = manifest[i];
        e.parent = static_cast<std::int32_t>(cur.u32());
        e.offset = cur.u64();
        e.length = cur.u64();
        e.dict_hash = cur.u32();
        e.name = cur.str(cur.u16());
        if (e.parent >= 0 && (static_cast<std::uint32_t>(e.parent) >= count || e.parent == static_cast<std::int32_t>(i)))
            throw integrity_error("GVCS: bad parent reference");
        if (e.offset + e.length > archive.size() || e.offset + e.length < e.offset)
            throw integrity_error("GVCS: stream outside archive");
    }

    SetDecodeResult res;
    res.images.resize(count);
    res.names.resize(count);
    res.parent.resize(count);
    res.dict_hashes.assign(count, 0);
    int root = -1;
    std::vector<std::vector<int>> children(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        res.parent[i] = manifest[i].parent;
        res.names[i] = manifest[i].name;
        if (manifest[i].parent < 0) {
            if (root >= 0) throw integrity_error("GVCS: multiple roots");
            root = static_cast<int>(i);
        } else {
            children[static_cast<std::size_t>(manifest[i].parent)].push_back(static_cast<int>(i));
        }
    }
    if (root < 0) throw integrity_error("GVCS: no root image");
    res.root = root;

    std::size_t decoded = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        auto idx = static_cast<std::size_t>(id);
        const ManifestEntry& e = manifest[idx];
        Dictionary dict = e.parent < 0
                              ? global_dict
                              : train_from_reference(res.images[static_cast<std::size_t>(e.parent)], params);
        std::uint32_t hash = dictionary_hash(dict);
        if (hash != e.dict_hash) throw integrity_error("GVCS: dictionary hash mismatch for image " + std::to_string(id));
        std::vector<std::uint8_t> stream(archive.begin() + static_cast<std::ptrdiff_t>(e.offset),
                                         archive.begin() + static_cast<std::ptrdiff_t>(e.offset + e.length));
        res.images[idx] = decode_image(Bitstream::parse(stream), dict);
        res.dict_hashes[idx] = hash;
        ++decoded;
        for (int c : children[idx]) queue.push_back(c);
    }
    if (decoded != count) throw integrity_error("GVCS: manifest contains a cycle");
    return res;
}

}  // namespace gvcsr
