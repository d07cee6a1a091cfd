#include <CLI11.hpp>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gvcsr/codec.hpp"
#include "gvcsr/errors.hpp"
#include "gvcsr/gvcd.hpp"
#include "gvcsr/setcoder.hpp"

namespace {

using namespace gvcsr;

CoderChoice parse_coder(const std::string& spec, const SparseCodingParams& sparse) {
    if (spec == "gvcsr") return CoderChoice::gvcsr_coder(sparse);
    if (spec.rfind("omp-l=", 0) == 0) {
        long l = std::stol(spec.substr(6));
        if (l < 1) throw io_error("--coder: omp-l needs a positive atom count");
        return CoderChoice::omp_l_coder(static_cast<std::size_t>(l));
    }
    if (spec.rfind("omp-e=", 0) == 0) {
        double e = std::stod(spec.substr(6));
        if (!(e > 0.0)) throw io_error("--coder: omp-e needs a positive error energy");
        return CoderChoice::omp_e_coder(e);
    }
    throw io_error("--coder: expected gvcsr, omp-l=<L>, or omp-e=<eps>");
}

std::string coder_tag(const CoderChoice& c) {
    switch (c.kind) {
        case CoderChoice::Kind::Gvcsr: return "gvcsr";
        case CoderChoice::Kind::OmpL: return "omp-l";
        case CoderChoice::Kind::OmpE: return "omp-e";
    }
    return "?";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open for writing");
    return out;
}

void print_learn_report(const LearnResult& res) {
    for (std::size_t i = 0; i < res.rounds.size(); ++i) {
        const LearnRoundInfo& r = res.rounds[i];
        std::printf(
            "round %zu: fidelity=%.6g l0=%.0f variance=%.6g objective=%.6g iters=%zu "
            "converged=%d mu=%.3g bound=%.3g mu_exceeds_bound=%d\n",
            i, r.terms.fidelity, r.terms.l0, r.terms.variance, r.terms.objective,
            r.solver_iterations, r.converged ? 1 : 0, r.mu_final, r.mu_bound,
            r.mu_exceeds_bound ? 1 : 0);
    }
}

struct CommonOpts {
    double alpha = 1.0;
    double beta = 0.001;
    double quant = 8.0;
    double gamma = 4.0;
    int patch = 8;
    std::string coder = "gvcsr";
    std::uint64_t seed = 0;
    std::size_t outer_iters = 10;
    std::size_t max_iters = 2000;
    std::string out;
};

SparseCodingParams sparse_from(const CommonOpts& o) {
    SparseCodingParams p;
    p.alpha = o.alpha;
    p.beta = o.beta;
    p.max_iters = o.max_iters;
    return p;
}

int cmd_train(const std::vector<std::string>& inputs, const CommonOpts& o) {
    std::vector<Eigen::MatrixXd> stacks;
    Eigen::Index n = 0, total = 0;
    for (const std::string& path : inputs) {
        PatchGrid g = to_patches(read_pgm(path), o.patch);
        stacks.push_back(g.residuals);
        n = g.residuals.rows();
        total += g.residuals.cols();
    }
    Eigen::MatrixXd s(n, total);
    Eigen::Index at = 0;
    for (const auto& m : stacks) {
        s.middleCols(at, m.cols()) = m;
        at += m.cols();
    }

    LearnParams lp;
    lp.sparse = sparse_from(o);
    lp.outer_iters = o.outer_iters;
    lp.seed = o.seed;
    auto m = static_cast<Eigen::Index>(std::llround(o.gamma * n));
    LearnResult res = learn(s, m, lp);
    print_learn_report(res);
    write_dictionary(o.out, res.dictionary);
    std::printf("wrote %s (n=%td m=%td hash=%08" PRIx32 ")\n", o.out.c_str(), res.dictionary.n(),
                res.dictionary.m(), dictionary_hash(res.dictionary));
    return 0;
}

int cmd_encode(const std::string& input, const std::string& dict_path, const CommonOpts& o) {
    GrayImage img = read_pgm(input);
    Dictionary d = read_dictionary(dict_path);
    EncodeResult enc = encode_image(img, d, parse_coder(o.coder, sparse_from(o)), QuantizerConfig{o.quant});
    auto bytes = enc.bitstream.serialize();
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw io_error(o.out + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error(o.out + ": write failed");
    std::printf("bpp=%.6f psnr=%.4f mean_l0=%.3f bytes=%zu\n", bpp(enc.bitstream, img),
                psnr(img, enc.reconstruction), enc.mean_l0, bytes.size());
    return 0;
}

int cmd_decode(const std::string& input, const std::string& dict_path, const CommonOpts& o) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw io_error(input + ": cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    GrayImage img = decode_image(Bitstream::parse(bytes), read_dictionary(dict_path));
    write_pgm(o.out, img);
    std::printf("wrote %s (%dx%d)\n", o.out.c_str(), img.width, img.height);
    return 0;
}

int cmd_rd_sweep(const std::vector<std::string>& inputs, const std::string& dict_path,
                 const std::vector<double>& alphas, const std::vector<double>& betas,
                 const std::vector<std::size_t>& omp_ls, const std::vector<double>& omp_es,
                 const std::vector<double>& quants, const CommonOpts& o) {
    Dictionary d = read_dictionary(dict_path);
    std::ofstream out = open_out(o.out);
    out << "# schema: gvcsr-rdsweep-v1\n";
    out << "image,coder,alpha,beta,L,eps,quant,bpp,psnr,mean_l0\n";
    char line[512];
    for (const std::string& path : inputs) {
        GrayImage img = read_pgm(path);
        std::string name = std::filesystem::path(path).filename().string();
        for (double q : quants) {
            auto emit = [&](const CoderChoice& coder, double a, double b, long l, double e) {
                EncodeResult enc = encode_image(img, d, coder, QuantizerConfig{q});
                std::snprintf(line, sizeof line, "%s,%s,%.17g,%.17g,%ld,%.17g,%.17g,%.6f,%.4f,%.4f\n",
                              name.c_str(), coder_tag(coder).c_str(), a, b, l, e, q,
                              bpp(enc.bitstream, img), psnr(img, enc.reconstruction), enc.mean_l0);
                out << line;
            };
            for (double a : alphas)
                for (double b : betas) {
                    SparseCodingParams p = sparse_from(o);
                    p.alpha = a;
                    p.beta = b;
                    emit(CoderChoice::gvcsr_coder(p), a, b, 0, 0.0);
                }
            for (std::size_t l : omp_ls) emit(CoderChoice::omp_l_coder(l), 0.0, 0.0, static_cast<long>(l), 0.0);
            for (double e : omp_es) emit(CoderChoice::omp_e_coder(e), 0.0, 0.0, 0, e);
        }
    }
    std::printf("wrote %s\n", o.out.c_str());
    return 0;
}

int cmd_trace(const std::string& input, const std::string& dict_path, const CommonOpts& o) {
    GrayImage img = read_pgm(input);
    Dictionary d = read_dictionary(dict_path);
    SparseCodingParams p = sparse_from(o);
    p.record_trajectory = true;
    PatchGrid grid = to_patches(img, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d.n())))));
    SparseCodeResult res = sparse_code(grid.residuals, d.atoms, p);
    std::ofstream out = open_out(o.out);
    out << "# schema: gvcsr-trace-v1\n";
    out << "iter,mse_term,variance_term,objective\n";
    char line[256];
    for (std::size_t i = 0; i < res.report.trajectory.size(); ++i) {
        const ObjectiveSample& t = res.report.trajectory[i];
        std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", i, t.fidelity, t.variance, t.objective);
        out << line;
    }
    std::printf("wrote %s (%zu iterations, converged=%d)\n", o.out.c_str(), res.report.iterations,
                res.report.converged ? 1 : 0);
    return 0;
}

int cmd_fig1(const CommonOpts& o) {
    std::ofstream out = open_out(o.out);
    out << "# schema: gvcsr-fig1-v1\n";
    out << "variance,bits_per_sample,gaussian_bound\n";
    char line[256];
    for (const Fig1Row& r : fig1_experiment(o.seed)) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", r.variance, r.bits_per_sample, r.gaussian_bound);
        out << line;
    }
    std::printf("wrote %s\n", o.out.c_str());
    return 0;
}

SetParams set_params_from(const CommonOpts& o) {
    SetParams sp;
    sp.quant = QuantizerConfig{o.quant};
    sp.coder = parse_coder(o.coder, sparse_from(o));
    sp.patch_size = o.patch;
    sp.retrain_gamma = o.gamma;
    sp.retrain_outer_iters = o.outer_iters;
    sp.retrain_sparse = sparse_from(o);
    return sp;
}

int cmd_set_encode(const std::vector<std::string>& inputs, const std::string& dict_path, const CommonOpts& o) {
    std::vector<GrayImage> images;
    std::vector<std::string> names;
    for (const std::string& path : inputs) {
        images.push_back(read_pgm(path));
        names.push_back(std::filesystem::path(path).filename().string());
    }
    SetEncodeResult res = encode_set(images, names, read_dictionary(dict_path), set_params_from(o));
    std::ofstream out(o.out, std::ios::binary);
    if (!out) throw io_error(o.out + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(res.archive.data()), static_cast<std::streamsize>(res.archive.size()));
    if (!out) throw io_error(o.out + ": write failed");

    double bpp_sum = 0.0, psnr_sum = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        std::printf("image %zu (%s): parent=%d bpp=%.6f psnr=%.4f dict=%08" PRIx32 "\n", i, names[i].c_str(),
                    res.mst.parent[i], res.stats[i].bpp, res.stats[i].psnr, res.dict_hashes[i]);
        bpp_sum += res.stats[i].bpp;
        psnr_sum += res.stats[i].psnr;
    }
    std::printf("average: bpp=%.6f psnr=%.4f (root=%d, archive=%zu bytes)\n",
                bpp_sum / static_cast<double>(images.size()), psnr_sum / static_cast<double>(images.size()),
                res.mst.root, res.archive.size());
    return 0;
}

int cmd_set_decode(const std::string& input, const std::string& dict_path, const CommonOpts& o) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw io_error(input + ": cannot open");
    std::vector<std::uint8_t> archive((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    SetDecodeResult res = decode_set(archive, read_dictionary(dict_path));
    std::filesystem::create_directories(o.out);
    for (std::size_t i = 0; i < res.images.size(); ++i) {
        std::string path = (std::filesystem::path(o.out) / res.names[i]).string();
        write_pgm(path, res.images[i]);
        std::printf("wrote %s (parent=%d dict=%08" PRIx32 ")\n", path.c_str(), res.parent[i], res.dict_hashes[i]);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variance-constrained sparse coding toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<std::string> inputs;
    std::string input, dict_path;
    std::vector<double> alphas{1.0}, betas{0.0}, omp_es, quants{8.0};
    std::vector<std::size_t> omp_ls;

    auto add_common = [&o](CLI::App* sub, bool want_out = true) {
        sub->add_option("--alpha", o.alpha, "l0 weight");
        sub->add_option("--beta", o.beta, "variance-rate weight");
        sub->add_option("--quant", o.quant, "quantizer step");
        sub->add_option("--gamma", o.gamma, "dictionary completeness M/N");
        sub->add_option("--patch", o.patch, "patch size");
        sub->add_option("--coder", o.coder, "gvcsr | omp-l=<L> | omp-e=<eps>");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--outer-iters", o.outer_iters, "dictionary update rounds");
        sub->add_option("--max-iters", o.max_iters, "solver iteration cap");
        if (want_out) sub->add_option("--out", o.out, "output path")->required();
    };

    CLI::App* train = app.add_subcommand("train", "learn a dictionary from PGM images");
    train->add_option("images", inputs, "training images (PGM)")->required()->check(CLI::ExistingFile);
    add_common(train);

    CLI::App* encode = app.add_subcommand("encode", "encode one PGM image");
    encode->add_option("image", input, "input image")->required()->check(CLI::ExistingFile);
    encode->add_option("--dict", dict_path, "dictionary file")->required()->check(CLI::ExistingFile);
    add_common(encode);

    CLI::App* decode = app.add_subcommand("decode", "decode a bitstream to PGM");
    decode->add_option("stream", input, "input bitstream")->required()->check(CLI::ExistingFile);
    decode->add_option("--dict", dict_path, "dictionary file")->required()->check(CLI::ExistingFile);
    add_common(decode);

    CLI::App* sweep = app.add_subcommand("rd-sweep", "rate-distortion sweep to CSV");
    sweep->add_option("images", inputs, "input images")->required()->check(CLI::ExistingFile);
    sweep->add_option("--dict", dict_path, "dictionary file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--alpha-list", alphas, "l0 weights")->delimiter(',');
    sweep->add_option("--beta-list", betas, "variance weights")->delimiter(',');
    sweep->add_option("--omp-l-list", omp_ls, "OMP sparsity stops")->delimiter(',');
    sweep->add_option("--omp-e-list", omp_es, "OMP error-energy stops")->delimiter(',');
    sweep->add_option("--quant-list", quants, "quantizer steps")->delimiter(',');
    add_common(sweep);

    CLI::App* trace = app.add_subcommand("trace", "per-iteration solver trace to CSV");
    trace->add_option("image", input, "input image")->required()->check(CLI::ExistingFile);
    trace->add_option("--dict", dict_path, "dictionary file")->required()->check(CLI::ExistingFile);
    add_common(trace);

    CLI::App* fig1 = app.add_subcommand("fig1", "variance vs coding bits experiment to CSV");
    add_common(fig1);

    CLI::App* set_encode = app.add_subcommand("set-encode", "encode an image set to an archive");
    set_encode->add_option("images", inputs, "input images")->required()->check(CLI::ExistingFile);
    set_encode->add_option("--dict", dict_path, "global dictionary for the root image")->required()->check(CLI::ExistingFile);
    add_common(set_encode);

    CLI::App* set_decode = app.add_subcommand("set-decode", "decode an archive to a directory of PGMs");
    set_decode->add_option("archive", input, "input archive")->required()->check(CLI::ExistingFile);
    set_decode->add_option("--dict", dict_path, "global dictionary for the root image")->required()->check(CLI::ExistingFile);
    add_common(set_decode);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(train)) return cmd_train(inputs, o);
        if (app.got_subcommand(encode)) return cmd_encode(input, dict_path, o);
        if (app.got_subcommand(decode)) return cmd_decode(input, dict_path, o);
        if (app.got_subcommand(sweep)) return cmd_rd_sweep(inputs, dict_path, alphas, betas, omp_ls, omp_es, quants, o);
        if (app.got_subcommand(trace)) return cmd_trace(input, dict_path, o);
        if (app.got_subcommand(fig1)) return cmd_fig1(o);
        if (app.got_subcommand(set_encode)) {
            // retraining wants a much richer dictionary than whole-corpus training
            if (set_encode->get_option("--gamma")->count() == 0) o.gamma = 14.0;
            if (set_encode->get_option("--outer-iters")->count() == 0) o.outer_iters = 2;
            return cmd_set_encode(inputs, dict_path, o);
        }
        if (app.got_subcommand(set_decode)) return cmd_set_decode(input, dict_path, o);
    } catch (const gvcsr::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const gvcsr::integrity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
