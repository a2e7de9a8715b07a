#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdf/closed_form.hpp"
#include "qdf/distributions.hpp"
#include "qdf/errors.hpp"
#include "qdf/fock.hpp"
#include "qdf/frft.hpp"
#include "qdf/io.hpp"
#include "qdf/tomography.hpp"
#include "qdf/version.hpp"

namespace qdf::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// ---------------------------------------------------------------------------
// State specification (JSON): {"kind":"fock","n":3}, {"kind":"coherent",
// "alpha":[re,im]}, {"kind":"cat","alpha1":[..],"alpha2":[..],"sign":"+"}.
// Complex amplitudes are [re, im] pairs; "fock_dim" optionally overrides the
// truncation dimension.
// ---------------------------------------------------------------------------

struct StateSpec {
    std::string kind;
    int n = 0;
    Complex alpha{};
    Complex alpha1{}, alpha2{};
    CatSign sign = CatSign::plus;
    std::optional<int> fock_dim;
    json raw;

    static Complex parse_amplitude(const json& j, const std::string& name) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
            throw ParameterError("state: " + name + " must be a [re, im] pair");
        const Complex a(j[0].get<double>(), j[1].get<double>());
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ParameterError("state: " + name + " must be finite");
        return a;
    }

    static StateSpec parse(const std::string& text) {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ParameterError(std::string("state: invalid JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
            throw ParameterError("state: need an object with a \"kind\" string");
        StateSpec s;
        s.raw = j;
        s.kind = j["kind"].get<std::string>();
        std::vector<std::string> allowed{"kind", "fock_dim"};
        if (s.kind == "fock") {
            if (!j.contains("n") || !j["n"].is_number_integer())
                throw ParameterError("state: fock needs integer \"n\"");
            s.n = j["n"].get<int>();
            if (s.n < 0) throw ParameterError("state: fock level must be non-negative");
            allowed.push_back("n");
        } else if (s.kind == "coherent") {
            if (!j.contains("alpha")) throw ParameterError("state: coherent needs \"alpha\"");
            s.alpha = parse_amplitude(j["alpha"], "alpha");
            allowed.push_back("alpha");
        } else if (s.kind == "cat") {
            for (const char* key : {"alpha1", "alpha2", "sign"})
                if (!j.contains(key))
                    throw ParameterError(std::string("state: cat needs \"") + key + "\"");
            s.alpha1 = parse_amplitude(j["alpha1"], "alpha1");
            s.alpha2 = parse_amplitude(j["alpha2"], "alpha2");
            const std::string sg = j["sign"].get<std::string>();
            if (sg == "+")
                s.sign = CatSign::plus;
            else if (sg == "-")
                s.sign = CatSign::minus;
            else
                throw ParameterError("state: cat sign must be \"+\" or \"-\"");
            allowed.insert(allowed.end(), {"alpha1", "alpha2", "sign"});
        } else {
            throw ParameterError("state: unknown kind \"" + s.kind + "\"");
        }
        if (j.contains("fock_dim")) {
            if (!j["fock_dim"].is_number_integer() || j["fock_dim"].get<int>() < 1)
                throw ParameterError("state: fock_dim must be a positive integer");
            s.fock_dim = j["fock_dim"].get<int>();
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
                throw ParameterError("state: unexpected field \"" + it.key() + "\" for kind " +
                                     s.kind);
        }
        return s;
    }

    double max_amplitude() const {
        if (kind == "coherent") return std::abs(alpha);
        if (kind == "cat") return std::max(std::abs(alpha1), std::abs(alpha2));
        return 0.0;
    }

    FockVector build(int dim) const {
        if (kind == "fock") return fock_state(n, dim);
        if (kind == "coherent") return coherent_state(alpha, dim);
        return cat_state(alpha1, alpha2, sign, dim);
    }

    std::string descriptor() const { return raw.dump(); }
};

// Truncation dimension precedence: explicit --quad flag, then the state's
// fock_dim field, then QDF_FOCK_DIM, then the library default of 64.
inline int resolve_fock_dim(const StateSpec& state, std::optional<int> quad_flag_dim) {
    if (quad_flag_dim) return *quad_flag_dim;
    if (state.fock_dim) return *state.fock_dim;
    if (const char* env = std::getenv("QDF_FOCK_DIM")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (...) {
        }
        throw ParameterError("QDF_FOCK_DIM must be a positive integer");
    }
    return 64;
}

// Dimension heuristic for series routes: displaced populations peak near
// (|alpha_state| + |alpha_probe|)^2; take that plus an 8-sigma tail margin.
inline int series_dim_for(const StateSpec& state, double probe_radius) {
    const double mean = std::pow(state.max_amplitude() + probe_radius, 2.0);
    return std::max(64, static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean + 1.0) + 16.0)));
}

inline QuadratureSpec default_quad(const StateSpec& state, std::optional<int> dim_override) {
    QuadratureSpec q;
    q.box_half_width = 2.0 * state.max_amplitude() + 8.0;
    q.points_per_axis = 201;
    q.fock_dim = resolve_fock_dim(state, dim_override);
    q.series_tail_tol = 1e-10;
    return q;
}

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

inline std::vector<double> split_csv_numbers(const std::string& text, size_t expect,
                                             const char* what) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            vals.push_back(std::stod(cell));
        } catch (...) {
            throw ParameterError(std::string(what) + ": cannot parse \"" + cell + "\"");
        }
    }
    if (vals.size() != expect)
        throw ParameterError(std::string(what) + ": expected " + std::to_string(expect) +
                             " comma-separated values");
    return vals;
}

inline PhaseGrid parse_grid(const std::string& text) {
    const auto v = split_csv_numbers(text, 6, "--grid");
    PhaseGrid g{v[0], v[1], static_cast<int>(v[2]), v[3], v[4], static_cast<int>(v[5])};
    g.validate();
    return g;
}

inline QuadratureSpec parse_quad(const std::string& text) {
    const auto v = split_csv_numbers(text, 4, "--quad");
    QuadratureSpec q{v[0], static_cast<int>(v[1]), static_cast<int>(v[2]), v[3]};
    q.validate();
    return q;
}

inline int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct RunTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

inline std::filesystem::path manifest_path(const std::filesystem::path& out) {
    std::filesystem::path m = out;
    m.replace_extension(".manifest.json");
    return m;
}

inline json base_manifest(const std::vector<std::string>& argv) {
    return json{{"command", argv}, {"library_version", qdf::version}};
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

struct ComputeOptions {
    std::string dist;
    std::string method;
    std::string state_json;
    std::string grid_text;
    std::string out;
    std::optional<std::string> quad_text;
    std::optional<double> s;
    std::optional<double> cot_a, cot_b;
    int threads = worker_threads();
};

inline ComplexField closed_form_field(const std::string& dist, const StateSpec& state,
                                      const PhaseGrid& grid) {
    ComplexField field;
    field.grid = grid;
    field.values.resize(grid.n_q, grid.n_p);
    field.provenance.distribution = dist;
    field.provenance.route = "closed-form";
    field.provenance.state = state.descriptor();

    auto fill = [&](auto&& f) {
        for (int i = 0; i < grid.n_q; ++i)
            for (int j = 0; j < grid.n_p; ++j)
                field.values(i, j) = f(PhasePoint{grid.q_at(i), grid.p_at(j)});
    };
    if (state.kind == "fock") {
        if (dist == "j")
            fill([&](PhasePoint pt) { return closedform::j_fock(state.n, pt); });
        else
            fill([&](PhasePoint pt) { return closedform::kirkwood_fock(state.n, pt); });
    } else {
        closedform::CatSpec spec;
        if (state.kind == "coherent") {
            spec = {state.alpha, state.alpha, CatSign::plus};
        } else {
            spec = {state.alpha1, state.alpha2, state.sign};
        }
        if (dist == "j")
            fill([&](PhasePoint pt) { return closedform::j_cat(spec, pt); });
        else
            fill([&](PhasePoint pt) { return closedform::kirkwood_cat(spec, pt); });
    }
    return field;
}

inline int cmd_compute(const ComputeOptions& opt, const std::vector<std::string>& argv) {
    RunTimer timer;
    const StateSpec state = StateSpec::parse(opt.state_json);
    const PhaseGrid grid = parse_grid(opt.grid_text);
    std::optional<QuadratureSpec> quad_flag;
    if (opt.quad_text) quad_flag = parse_quad(*opt.quad_text);
    QuadratureSpec quad =
        quad_flag ? *quad_flag
                  : default_quad(state, std::nullopt);

    ComplexField field;
    if (opt.method == "closedform") {
        if (opt.dist != "j" && opt.dist != "kirkwood")
            throw ParameterError("closed forms exist only for --dist j and kirkwood");
        field = closed_form_field(opt.dist, state, grid);
    } else {
        const FockVector psi = state.build(quad.fock_dim);
        const DensityOperator rho = density_from_pure(psi);
        std::optional<dist::Route> route;
        if (opt.dist == "j") {
            if (opt.method == "integral") route = dist::Route::j_integral();
            if (opt.method == "trace") route = dist::Route::j_trace();
            if (opt.method == "multiplier") route = dist::Route::j_multiplier();
            if (opt.method == "wigner-fresnel") route = dist::Route::j_wigner_fresnel();
            if (opt.method == "general") {
                if (!opt.cot_a || !opt.cot_b)
                    throw ParameterError("--method general needs --cota and --cotb");
                route = dist::Route::j_general(*opt.cot_a, *opt.cot_b);
            }
        } else if (opt.dist == "kirkwood") {
            if (opt.method == "integral") route = dist::Route::kirkwood_integral();
        } else if (opt.dist == "wigner") {
            if (opt.method == "trace") route = dist::Route::wigner_parity();
            if (opt.method == "integral") {
                field = dist::characteristic_transform(rho, grid, quad,
                                                       dist::ChirpMultiplier::identity,
                                                       opt.threads);
                field.provenance.state = state.descriptor();
            }
        } else if (opt.dist == "sparam") {
            if (opt.method == "trace") {
                if (!opt.s) throw ParameterError("--dist sparam needs --s");
                route = dist::Route::s_param(*opt.s);
            }
        } else {
            throw ParameterError("unknown --dist \"" + opt.dist + "\"");
        }
        if (route) {
            field = dist::grid_eval(*route, rho, grid, quad, opt.threads, state.descriptor());
        } else if (field.values.size() == 0) {
            throw ParameterError("unsupported --dist/--method combination: " + opt.dist + "/" +
                                 opt.method);
        }
    }

    io::write_field_csv(field, opt.out);
    json manifest = base_manifest(argv);
    manifest["subcommand"] = "compute";
    manifest["state"] = state.raw;
    manifest["grid"] = io::to_json(grid);
    manifest["quadrature"] = io::to_json(quad);
    manifest["route"] = {{"dist", opt.dist}, {"method", opt.method}};
    if (opt.s) manifest["route"]["s"] = *opt.s;
    if (opt.cot_a) manifest["route"]["cot_a"] = *opt.cot_a;
    if (opt.cot_b) manifest["route"]["cot_b"] = *opt.cot_b;
    manifest["provenance"] = io::to_json(field.provenance);
    manifest["outputs"] = {opt.out};
    manifest["wall_time_ms"] = timer.elapsed_ms();
    io::write_json(manifest, manifest_path(opt.out));

    for (const auto& w : field.provenance.warnings) std::cerr << "warning: " << w << "\n";
    if (field.provenance.failed) {
        for (const auto& e : field.provenance.errors) std::cerr << "error: " << e << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::string suite;
    std::optional<std::string> state_json;
    std::optional<double> tol;
    int threads = worker_threads();
};

struct CheckTable {
    bool all_pass = true;
    void row(const std::string& name, double metric, double tol) {
        const bool pass = metric < tol;
        all_pass = all_pass && pass;
        std::printf("%s  %-38s  %.3e  (tol %.1e)\n", pass ? "PASS" : "FAIL", name.c_str(), metric,
                    tol);
    }
};

inline int cmd_verify(const VerifyOptions& opt) {
    CheckTable table;
    const StateSpec state =
        StateSpec::parse(opt.state_json.value_or(R"({"kind":"fock","n":0})"));

    if (opt.suite == "normalization") {
        const double tol = opt.tol.value_or(5e-3);
        const double reach = kSqrt2 * state.max_amplitude();
        const double half = std::max(5.0, reach + 4.0);
        const int pts = half > 6.0 ? 161 : 101;
        const PhaseGrid grid{-half, half, pts, -half, half, pts};
        QuadratureSpec quad = default_quad(state, std::nullopt);
        quad.fock_dim = std::max(quad.fock_dim, series_dim_for(state, half));
        const DensityOperator rho = density_from_pure(state.build(quad.fock_dim));
        const ComplexField f =
            dist::grid_eval(dist::Route::j_trace(), rho, grid, quad, opt.threads);
        const Complex total = dist::field_integral(f);
        table.row("|field integral of J - 1|", std::abs(total - 1.0), tol);
    } else if (opt.suite == "routes") {
        const double tol = opt.tol.value_or(1e-3);
        const PhaseGrid grid{-3, 3, 9, -3, 3, 9};
        QuadratureSpec quad = default_quad(state, std::nullopt);
        quad.box_half_width = std::max(quad.box_half_width, 12.0);
        quad.fock_dim = std::max(quad.fock_dim, series_dim_for(state, 3.0));
        const DensityOperator rho = density_from_pure(state.build(quad.fock_dim));
        const ComplexField a =
            dist::grid_eval(dist::Route::j_integral(), rho, grid, quad, opt.threads);
        const ComplexField b =
            dist::grid_eval(dist::Route::j_trace(), rho, grid, quad, opt.threads);
        const ComplexField c =
            dist::grid_eval(dist::Route::j_multiplier(), rho, grid, quad, opt.threads);
        table.row("max |j_integral - j_trace|", (a.values - b.values).cwiseAbs().maxCoeff(), tol);
        table.row("max |j_multiplier - j_trace|", (c.values - b.values).cwiseAbs().maxCoeff(), tol);
        table.row("max |j_integral - j_multiplier|", (a.values - c.values).cwiseAbs().maxCoeff(),
                  tol);
    } else if (opt.suite == "identity") {
        const double tol = opt.tol.value_or(1e-3);
        QuadratureSpec quad;
        quad.box_half_width = 8.0;
        quad.points_per_axis = 201;
        quad.fock_dim = 24;
        table.row("displacement identity (Frobenius)", dist::gaussian_displacement_identity(quad),
                  tol);
    } else if (opt.suite == "frft") {
        const auto grid = frft::SignalGrid::symmetric(8.0, 512);
        const frft::FrFTOrder om(M_PI / 3.0);
        const Complex phi0 = frft::measured_phase(om, grid);
        double worst = 0.0;
        for (int n = 0; n <= 4; ++n) {
            const frft::SampledSignal in = frft::hermite_gauss(n, grid);
            const frft::SampledSignal out = frft::apply(in, om);
            const Complex expect = phi0 * std::polar(1.0, -n * om.omega);
            worst = std::max(worst, (out.samples - expect * in.samples).cwiseAbs().maxCoeff());
        }
        table.row("Hermite-Gauss eigenrelation", worst, opt.tol.value_or(1e-5));
        const frft::SampledSignal s = frft::hermite_gauss(3, grid);
        const frft::SampledSignal rt = frft::apply(frft::apply(s, om), frft::FrFTOrder(-om.omega));
        table.row("roundtrip F(-w) F(w)", (rt.samples - s.samples).cwiseAbs().maxCoeff(),
                  opt.tol.value_or(1e-5));
        const frft::FrFTOrder quarter(M_PI / 2.0);
        const frft::SampledSignal f = frft::apply(s, quarter);
        Vector direct(grid.count);
        for (int i = 0; i < grid.count; ++i) {
            Complex acc = 0.0;
            for (int j = 0; j < grid.count; ++j) {
                const double w = (j == 0 || j == grid.count - 1) ? 0.5 * grid.step : grid.step;
                acc += w * std::polar(1.0, -grid.x_at(i) * grid.x_at(j)) * s.samples[j];
            }
            direct[i] = acc / std::sqrt(2.0 * M_PI);
        }
        table.row("omega = pi/2 vs Fourier quadrature", (f.samples - direct).cwiseAbs().maxCoeff(),
                  opt.tol.value_or(1e-8));
        table.row("delta roundtrip", frft::delta_roundtrip_check(0.0, om, grid),
                  opt.tol.value_or(1e-4));
    } else if (opt.suite == "bch") {
        const double tol = opt.tol.value_or(1e-8);
        const int dim = 32, build = 96;
        const auto [qop, pop] = quadrature_operators(build);
        const Matrix& q = qop.matrix;
        const Matrix& p = pop.matrix;
        const struct {
            double u, v, cot_a, cot_b;
        } samples[3] = {{0.7, -0.3, M_PI, -M_PI}, {1.0, 0.5, 2.5, -1.7}, {-0.4, 0.8, 0.9, -2.2}};
        for (const auto& smp : samples) {
            const double ta = 1.0 / smp.cot_a, tb = 1.0 / smp.cot_b;
            const Matrix eq = (Complex(0, smp.u * tb) * q).exp();
            const Matrix ep = (Complex(0, -smp.v * ta) * p).exp();
            const Matrix eq_inv = (Complex(0, -smp.u * tb) * q).exp();
            const Matrix ep_inv = (Complex(0, smp.v * ta) * p).exp();
            Matrix joint_gen = Complex(0, smp.u * tb) * q + Complex(0, -smp.v * ta) * p;
            const Matrix joint = joint_gen.exp();
            const Matrix lhs_split = eq * ep;
            const Matrix rhs_split =
                std::polar(1.0, 0.5 * smp.u * smp.v * ta * tb) * joint;
            const double err_split = (lhs_split.topLeftCorner(dim / 2, dim / 2) -
                                      rhs_split.topLeftCorner(dim / 2, dim / 2))
                                         .norm();
            Matrix quad_gen = Complex(0, 0.5 * smp.cot_b) * (p * p) -
                              Complex(0, 0.5 * smp.cot_a) * (q * q);
            Matrix full_gen = Complex(0, smp.v) * q - Complex(0, smp.u) * p + quad_gen;
            const Matrix lhs_full = full_gen.exp();
            const Matrix omega = quad_gen.exp();
            const Matrix rhs_full = std::polar(1.0, -0.5 * smp.u * smp.u * tb) *
                                    std::polar(1.0, 0.5 * smp.v * smp.v * ta) *
                                    (eq * ep * omega * ep_inv * eq_inv);
            const double err_full = (lhs_full.topLeftCorner(dim / 2, dim / 2) -
                                     rhs_full.topLeftCorner(dim / 2, dim / 2))
                                        .norm();
            char name[96];
            std::snprintf(name, sizeof(name), "split identity at (%.1f,%.1f)", smp.u, smp.v);
            table.row(name, err_split, tol);
            std::snprintf(name, sizeof(name), "factorized kernel at (%.1f,%.1f)", smp.u, smp.v);
            table.row(name, err_full, tol);
        }
    } else {
        throw ParameterError("unknown verify suite \"" + opt.suite + "\"");
    }
    return table.all_pass ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

struct ReconstructOptions {
    std::string state_json;
    std::string grid_text;
    std::string out;
    double chi = 1.0;
    bool raw_polarizations = false;
    std::optional<std::string> quad_text;
    int threads = worker_threads();
};

inline int cmd_reconstruct(const ReconstructOptions& opt, const std::vector<std::string>& argv) {
    RunTimer timer;
    const StateSpec state = StateSpec::parse(opt.state_json);
    const PhaseGrid grid = parse_grid(opt.grid_text);
    std::optional<QuadratureSpec> quad_flag;
    if (opt.quad_text) quad_flag = parse_quad(*opt.quad_text);
    QuadratureSpec quad = quad_flag ? *quad_flag : default_quad(state, std::nullopt);
    if (!quad_flag) {
        const double reach =
            std::hypot(std::max(std::abs(grid.q_min), std::abs(grid.q_max)),
                       std::max(std::abs(grid.p_min), std::abs(grid.p_max))) / kSqrt2;
        quad.fock_dim = std::max(quad.fock_dim, series_dim_for(state, reach));
    }
    if (opt.chi <= 0.0) throw ParameterError("--chi must be positive");

    const FockVector phi = state.build(quad.fock_dim);
    ComplexField rec = tomo::reconstruct_j(phi, grid, opt.chi, opt.threads, state.descriptor());
    rec.provenance.quad = quad;

    const DensityOperator rho = density_from_pure(phi);
    const ComplexField ref =
        dist::grid_eval(dist::Route::j_trace(), rho, grid, quad, opt.threads, state.descriptor());
    const double dev = (rec.values - ref.values).cwiseAbs().maxCoeff();

    io::write_field_csv(rec, opt.out);
    json manifest = base_manifest(argv);
    manifest["subcommand"] = "reconstruct";
    manifest["state"] = state.raw;
    manifest["grid"] = io::to_json(grid);
    manifest["quadrature"] = io::to_json(quad);
    manifest["chi"] = opt.chi;
    manifest["t_star"] = tomo::reconstruction_time(opt.chi);
    manifest["max_deviation_vs_trace"] = dev;
    manifest["provenance"] = io::to_json(rec.provenance);
    json outputs = {opt.out};

    if (opt.raw_polarizations) {
        const tomo::PolarizationMaps maps = tomo::polarization_sweep(
            phi, grid, opt.chi, tomo::reconstruction_time(opt.chi), opt.threads);
        for (const char* which : {"sx", "sy"}) {
            ComplexField m;
            m.grid = grid;
            m.values = (std::string(which) == "sx" ? maps.sx : maps.sy).cast<Complex>();
            m.provenance = rec.provenance;
            m.provenance.route = "reconstructed";
            m.provenance.distribution = which;
            std::filesystem::path path = opt.out;
            path.replace_extension(std::string(".") + which + ".csv");
            io::write_field_csv(m, path);
            outputs.push_back(path.string());
        }
    }
    manifest["outputs"] = outputs;
    manifest["wall_time_ms"] = timer.elapsed_ms();
    io::write_json(manifest, manifest_path(opt.out));

    std::printf("max |J_rec - J_trace| = %.3e\n", dev);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// frft
// ---------------------------------------------------------------------------

struct FrftOptions {
    double omega = 0.0;
    std::string in;
    std::string out;
};

inline int cmd_frft(const FrftOptions& opt, const std::vector<std::string>& argv) {
    RunTimer timer;
    const frft::SampledSignal sig = io::read_signal_csv(opt.in);
    const frft::FrFTOrder order(opt.omega);  // throws OrderError near k*pi
    std::vector<std::string> warnings;
    const frft::SampledSignal out = frft::apply(sig, order, &warnings);
    io::write_signal_csv(out, opt.out);
    json manifest = base_manifest(argv);
    manifest["subcommand"] = "frft";
    manifest["omega"] = opt.omega;
    manifest["input"] = opt.in;
    manifest["outputs"] = {opt.out};
    manifest["warnings"] = warnings;
    manifest["wall_time_ms"] = timer.elapsed_ms();
    io::write_json(manifest, manifest_path(opt.out));
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"phase-space quasiprobability distributions"};
    app.require_subcommand(1);

    ComputeOptions copt;
    auto* compute = app.add_subcommand("compute", "evaluate a distribution on a phase grid");
    compute->add_option("--dist", copt.dist, "j | kirkwood | wigner | sparam")->required();
    compute->add_option("--method", copt.method,
                        "integral | trace | multiplier | closedform | general | wigner-fresnel")
        ->required();
    compute->add_option("--state", copt.state_json, "state JSON")->required();
    compute->add_option("--grid", copt.grid_text, "qmin,qmax,nq,pmin,pmax,np")->required();
    compute->add_option("--out", copt.out, "output CSV path")->required();
    std::string quad_text, quad_text_r;
    compute->add_option("--quad", quad_text, "L,M,N,eps");
    double s_val = 0.0, cota = 0.0, cotb = 0.0;
    auto* s_opt = compute->add_option("--s", s_val, "s parameter");
    auto* ca_opt = compute->add_option("--cota", cota, "cot(alpha) for --method general");
    auto* cb_opt = compute->add_option("--cotb", cotb, "cot(beta) for --method general");
    compute->add_option("--threads", copt.threads, "worker threads");

    VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", vopt.suite, "normalization | routes | identity | frft | bch")
        ->required();
    std::string vstate;
    auto* vstate_opt = verify->add_option("--state", vstate, "state JSON");
    double vtol = 0.0;
    auto* vtol_opt = verify->add_option("--tol", vtol, "tolerance override");
    verify->add_option("--threads", vopt.threads, "worker threads");

    ReconstructOptions ropt;
    auto* reconstruct = app.add_subcommand("reconstruct", "dispersive-protocol reconstruction");
    reconstruct->add_option("--state", ropt.state_json, "state JSON")->required();
    reconstruct->add_option("--grid", ropt.grid_text, "qmin,qmax,nq,pmin,pmax,np")->required();
    reconstruct->add_option("--out", ropt.out, "output CSV path")->required();
    reconstruct->add_option("--chi", ropt.chi, "dispersive coupling rate")->required();
    reconstruct->add_flag("--raw-polarizations", ropt.raw_polarizations,
                          "also write sigma_x / sigma_y maps");
    reconstruct->add_option("--quad", quad_text_r, "L,M,N,eps");
    reconstruct->add_option("--threads", ropt.threads, "worker threads");

    FrftOptions fopt;
    auto* frft_cmd = app.add_subcommand("frft", "fractional Fourier transform of a signal CSV");
    frft_cmd->add_option("--omega", fopt.omega, "transform order in radians")->required();
    frft_cmd->add_option("--in", fopt.in, "input signal CSV")->required();
    frft_cmd->add_option("--out", fopt.out, "output signal CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return kExitOk;
        }
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*compute) {
            if (!quad_text.empty()) copt.quad_text = quad_text;
            if (*s_opt) copt.s = s_val;
            if (*ca_opt) copt.cot_a = cota;
            if (*cb_opt) copt.cot_b = cotb;
            std::vector<std::string> argv{"qdf", "compute"};
            argv.insert(argv.end(), args.begin() + 1, args.end());
            return cmd_compute(copt, argv);
        }
        if (*verify) {
            if (*vstate_opt) vopt.state_json = vstate;
            if (*vtol_opt) vopt.tol = vtol;
            return cmd_verify(vopt);
        }
        if (*reconstruct) {
            if (!quad_text_r.empty()) ropt.quad_text = quad_text_r;
            std::vector<std::string> argv{"qdf", "reconstruct"};
            argv.insert(argv.end(), args.begin() + 1, args.end());
            return cmd_reconstruct(ropt, argv);
        }
        if (*frft_cmd) {
            std::vector<std::string> argv{"qdf", "frft"};
            argv.insert(argv.end(), args.begin() + 1, args.end());
            return cmd_frft(fopt, argv);
        }
    } catch (const TruncationError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

} // namespace qdf::cli
