#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gvcsr/codec.hpp"
#include "gvcsr/errors.hpp"
#include "gvcsr/gvcd.hpp"
#include "gvcsr/rate_model.hpp"
#include "gvcsr/setcoder.hpp"

namespace py = pybind11;
using namespace gvcsr;

namespace {

GrayImage image_from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw py::value_error("image must be a 2-d uint8 array");
    GrayImage img;
    img.height = static_cast<int>(arr.shape(0));
    img.width = static_cast<int>(arr.shape(1));
    img.pixels.assign(arr.data(), arr.data() + arr.size());
    return img;
}

py::array_t<std::uint8_t> array_from_image(const GrayImage& img) {
    py::array_t<std::uint8_t> arr({img.height, img.width});
    std::copy(img.pixels.begin(), img.pixels.end(), arr.mutable_data());
    return arr;
}

SparseCodingParams make_params(double alpha, double beta, double mu0, double mu_max, double rho, double eps,
                               std::size_t max_iters, bool record_trajectory) {
    SparseCodingParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.mu0 = mu0;
    p.mu_max = mu_max;
    p.rho = rho;
    p.eps = eps;
    p.max_iters = max_iters;
    p.record_trajectory = record_trajectory;
    return p;
}

CoderChoice coder_from(const std::string& kind, const SparseCodingParams& p, std::size_t omp_l, double omp_eps) {
    if (kind == "gvcsr") return CoderChoice::gvcsr_coder(p);
    if (kind == "omp-l") return CoderChoice::omp_l_coder(omp_l);
    if (kind == "omp-e") return CoderChoice::omp_e_coder(omp_eps);
    throw py::value_error("coder must be gvcsr, omp-l, or omp-e");
}

py::dict report_dict(const SolveReport& rep) {
    py::dict d;
    d["iterations"] = rep.iterations;
    d["converged"] = rep.converged;
    d["final_residuals"] = rep.final_residuals;
    d["final_mu"] = rep.final_mu;
    py::list traj;
    for (const ObjectiveSample& t : rep.trajectory) {
        py::dict row;
        row["fidelity"] = t.fidelity;
        row["l0"] = t.l0;
        row["variance"] = t.variance;
        row["objective"] = t.objective;
        traj.append(row);
    }
    d["trajectory"] = traj;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gvcsr, m) {
    m.doc() = "Variance-constrained sparse coding core";

    py::register_exception<io_error>(m, "IoError", PyExc_OSError);
    py::register_exception<integrity_error>(m, "IntegrityError", PyExc_ValueError);

    m.def(
        "sparse_code",
        [](const Eigen::MatrixXd& s, const Eigen::MatrixXd& d, double alpha, double beta, double mu0,
           double mu_max, double rho, double eps, std::size_t max_iters, bool record_trajectory) {
            SparseCodeResult res = sparse_code(
                s, d, make_params(alpha, beta, mu0, mu_max, rho, eps, max_iters, record_trajectory));
            return py::make_tuple(res.a, report_dict(res.report));
        },
        py::arg("signals"), py::arg("dictionary"), py::arg("alpha") = 1.0, py::arg("beta") = 0.0,
        py::arg("mu0") = 1e-2, py::arg("mu_max") = 1e8, py::arg("rho") = 1.2, py::arg("eps") = 1e-5,
        py::arg("max_iters") = 2000, py::arg("record_trajectory") = false,
        "Jointly sparse-code signal columns against a dictionary; returns (coefficients, report).");

    m.def(
        "learn",
        [](const Eigen::MatrixXd& s, std::size_t m_atoms, double alpha, double beta, std::size_t outer_iters,
           double kappa, std::uint64_t seed, std::size_t max_iters) {
            LearnParams lp;
            lp.sparse.alpha = alpha;
            lp.sparse.beta = beta;
            lp.sparse.max_iters = max_iters;
            lp.outer_iters = outer_iters;
            lp.kappa = kappa;
            lp.seed = seed;
            LearnResult res = learn(s, static_cast<Eigen::Index>(m_atoms), lp);
            py::list rounds;
            for (const LearnRoundInfo& r : res.rounds) {
                py::dict row;
                row["objective"] = r.terms.objective;
                row["fidelity"] = r.terms.fidelity;
                row["l0"] = r.terms.l0;
                row["variance"] = r.terms.variance;
                row["solver_iterations"] = r.solver_iterations;
                row["converged"] = r.converged;
                row["mu_final"] = r.mu_final;
                row["mu_bound"] = r.mu_bound;
                row["mu_exceeds_bound"] = r.mu_exceeds_bound;
                rounds.append(row);
            }
            return py::make_tuple(res.dictionary.atoms, res.a, rounds);
        },
        py::arg("signals"), py::arg("atoms"), py::arg("alpha") = 1.0, py::arg("beta") = 0.0,
        py::arg("outer_iters") = 20, py::arg("kappa") = 4.0, py::arg("seed") = 0, py::arg("max_iters") = 2000,
        "Learn a dictionary; returns (atoms, coefficients, per-round stats).");

    m.def(
        "omp",
        [](const Eigen::VectorXd& s, const Eigen::MatrixXd& d, std::size_t sparsity, double error_energy) {
            PursuitStop stop = error_energy > 0.0 ? PursuitStop::energy(error_energy)
                                                  : PursuitStop::sparsity_limit(sparsity);
            OmpResult res = omp(s, Dictionary{d}, stop);
            return py::make_tuple(res.coeffs, res.target_missed, res.iterations);
        },
        py::arg("signal"), py::arg("dictionary"), py::arg("sparsity") = 4, py::arg("error_energy") = 0.0,
        "Orthogonal matching pursuit; returns (coefficients, target_missed, iterations).");

    m.def("coefficient_variance", &coefficient_variance, py::arg("coefficients"));
    m.def("gaussian_entropy_bound", &gaussian_entropy_bound, py::arg("variance"));
    m.def("laplacian_entropy", &laplacian_entropy, py::arg("variance"));
    m.def(
        "rate_estimate",
        [](const Eigen::MatrixXd& a) {
            RateEstimate r = rate_estimate(a);
            py::dict d;
            d["variance"] = r.variance;
            d["gaussian_bound_bits"] = r.gaussian_bound_bits;
            d["laplacian_bits"] = r.laplacian_bits;
            return d;
        },
        py::arg("coefficients"));

    m.def(
        "fast_z_svd",
        [](std::size_t k) {
            ZSvd z = fast_z_svd(k);
            return py::make_tuple(z.singular_values(), z.basis_dense());
        },
        py::arg("k"), "Closed-form SVD of the variance-rate kernel; returns (singular_values, basis).");

    m.def(
        "encode_image",
        [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& pixels,
           const Eigen::MatrixXd& atoms, const std::string& coder, double quant_step, double alpha, double beta,
           std::size_t omp_l, double omp_eps, std::size_t max_iters) {
            SparseCodingParams p;
            p.alpha = alpha;
            p.beta = beta;
            p.max_iters = max_iters;
            Dictionary d{atoms};
            EncodeResult enc = encode_image(image_from_array(pixels), d, coder_from(coder, p, omp_l, omp_eps),
                                            QuantizerConfig{quant_step});
            auto bytes = enc.bitstream.serialize();
            py::dict stats;
            stats["bpp"] = static_cast<double>(enc.bitstream.total_bits()) /
                           (static_cast<double>(pixels.shape(0)) * static_cast<double>(pixels.shape(1)));
            stats["mean_l0"] = enc.mean_l0;
            stats["reconstruction"] = array_from_image(enc.reconstruction);
            return py::make_tuple(py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size()), stats);
        },
        py::arg("pixels"), py::arg("atoms"), py::arg("coder") = "gvcsr", py::arg("quant_step") = 8.0,
        py::arg("alpha") = 1.0, py::arg("beta") = 0.001, py::arg("omp_l") = 4, py::arg("omp_eps") = 0.0,
        py::arg("max_iters") = 2000, "Encode a grayscale image; returns (bitstream bytes, stats).");

    m.def(
        "decode_image",
        [](const py::bytes& stream, const Eigen::MatrixXd& atoms) {
            std::string buf = stream;
            std::vector<std::uint8_t> bytes(buf.begin(), buf.end());
            return array_from_image(decode_image(Bitstream::parse(bytes), Dictionary{atoms}));
        },
        py::arg("stream"), py::arg("atoms"), "Decode a bitstream produced by encode_image.");

    m.def(
        "read_pgm", [](const std::string& path) { return array_from_image(read_pgm(path)); }, py::arg("path"));
    m.def(
        "write_pgm",
        [](const std::string& path,
           const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& pixels) {
            write_pgm(path, image_from_array(pixels));
        },
        py::arg("path"), py::arg("pixels"));

    m.def(
        "dictionary_hash", [](const Eigen::MatrixXd& atoms) { return dictionary_hash(Dictionary{atoms}); },
        py::arg("atoms"));
}
