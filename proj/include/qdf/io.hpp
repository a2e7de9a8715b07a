#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdf/errors.hpp"
#include "qdf/frft.hpp"
#include "qdf/grid.hpp"

namespace qdf::io {

using nlohmann::json;

// 12 significant digits of scientific notation; the text is the canonical
// representation, chosen so parse -> emit is byte-stable.
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.11e", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParameterError("cannot open " + tmp.string() + " for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Field CSV: header q,p,re,im; row-major with p varying fastest.
// ---------------------------------------------------------------------------

inline std::string emit_field_csv(const ComplexField& field) {
    std::string out = "q,p,re,im\n";
    out.reserve(out.size() + static_cast<size_t>(field.grid.n_q) * field.grid.n_p * 64);
    for (int i = 0; i < field.grid.n_q; ++i) {
        const std::string qs = sci(field.grid.q_at(i));
        for (int j = 0; j < field.grid.n_p; ++j) {
            out += qs;
            out += ',';
            out += sci(field.grid.p_at(j));
            out += ',';
            out += sci(field.values(i, j).real());
            out += ',';
            out += sci(field.values(i, j).imag());
            out += '\n';
        }
    }
    return out;
}

inline void write_field_csv(const ComplexField& field, const std::filesystem::path& path) {
    atomic_write(path, emit_field_csv(field));
}

namespace detail {

inline std::vector<double> split_doubles(const std::string& line, size_t expect) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != expect)
        throw ParameterError("CSV row has " + std::to_string(vals.size()) + " cells, expected " +
                             std::to_string(expect));
    return vals;
}

} // namespace detail

inline ComplexField parse_field_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("q,p,re,im", 0) != 0)
        throw ParameterError("field CSV must start with header q,p,re,im");
    std::vector<double> qs, ps;
    std::vector<Complex> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = detail::split_doubles(line, 4);
        qs.push_back(v[0]);
        ps.push_back(v[1]);
        vals.emplace_back(v[2], v[3]);
    }
    if (vals.empty()) throw ParameterError("field CSV has no data rows");
    // p varies fastest: the first block with constant q fixes n_p
    size_t n_p = 1;
    while (n_p < qs.size() && qs[n_p] == qs[0]) ++n_p;
    if (vals.size() % n_p != 0)
        throw ParameterError("field CSV is not a complete rectangular grid");
    const size_t n_q = vals.size() / n_p;
    ComplexField field;
    field.grid.q_min = qs.front();
    field.grid.q_max = qs.back();
    field.grid.n_q = static_cast<int>(n_q);
    field.grid.p_min = ps.front();
    field.grid.p_max = ps[n_p - 1];
    field.grid.n_p = static_cast<int>(n_p);
    field.grid.validate();
    field.values.resize(n_q, n_p);
    for (size_t i = 0; i < n_q; ++i)
        for (size_t j = 0; j < n_p; ++j) field.values(i, j) = vals[i * n_p + j];
    return field;
}

inline ComplexField read_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open " + path.string());
    return parse_field_csv(in);
}

// ---------------------------------------------------------------------------
// Signal CSV: header x,re,im.
// ---------------------------------------------------------------------------

inline std::string emit_signal_csv(const frft::SampledSignal& sig) {
    std::string out = "x,re,im\n";
    for (int i = 0; i < sig.grid.count; ++i) {
        out += sci(sig.grid.x_at(i));
        out += ',';
        out += sci(sig.samples[i].real());
        out += ',';
        out += sci(sig.samples[i].imag());
        out += '\n';
    }
    return out;
}

inline void write_signal_csv(const frft::SampledSignal& sig, const std::filesystem::path& path) {
    atomic_write(path, emit_signal_csv(sig));
}

inline frft::SampledSignal parse_signal_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,re,im", 0) != 0)
        throw ParameterError("signal CSV must start with header x,re,im");
    std::vector<double> xs;
    std::vector<Complex> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = detail::split_doubles(line, 3);
        xs.push_back(v[0]);
        vals.emplace_back(v[1], v[2]);
    }
    if (xs.size() < 2) throw ParameterError("signal CSV needs at least 2 samples");
    frft::SampledSignal sig;
    sig.grid.x_min = xs.front();
    sig.grid.count = static_cast<int>(xs.size());
    sig.grid.step = (xs.back() - xs.front()) / (xs.size() - 1);
    for (size_t i = 1; i < xs.size(); ++i) {
        if (std::abs(xs[i] - xs[i - 1] - sig.grid.step) > 1e-9 * std::max(1.0, sig.grid.step))
            throw ParameterError("signal CSV grid is not uniform");
    }
    sig.grid.validate();
    sig.samples = Vector(sig.grid.count);
    for (int i = 0; i < sig.grid.count; ++i) sig.samples[i] = vals[i];
    return sig;
}

inline frft::SampledSignal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open " + path.string());
    return parse_signal_csv(in);
}

// ---------------------------------------------------------------------------
// JSON pieces for manifests / sidecars
// ---------------------------------------------------------------------------

inline json to_json(const PhaseGrid& g) {
    return json{{"q_min", g.q_min}, {"q_max", g.q_max}, {"n_q", g.n_q},
                {"p_min", g.p_min}, {"p_max", g.p_max}, {"n_p", g.n_p}};
}

inline json to_json(const QuadratureSpec& q) {
    return json{{"box_half_width", q.box_half_width},
                {"points_per_axis", q.points_per_axis},
                {"fock_dim", q.fock_dim},
                {"series_tail_tol", q.series_tail_tol}};
}

inline json to_json(const Provenance& p) {
    return json{{"distribution", p.distribution}, {"route", p.route},  {"state", p.state},
                {"quadrature", to_json(p.quad)},  {"warnings", p.warnings},
                {"errors", p.errors},             {"failed", p.failed}};
}

inline void write_json(const json& j, const std::filesystem::path& path) {
    atomic_write(path, j.dump(2) + "\n");
}

} // namespace qdf::io
