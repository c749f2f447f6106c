#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmd/grid.hpp"
#include "lmd/observables.hpp"
#include "lmd/state.hpp"

namespace lmd {

/// Round-trip exact formatting for 64-bit floats.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string observables_csv_header(int ndof) {
    std::string h = "t,norm,energy,axiom1_residual";
    for (int d = 1; d <= ndof; ++d) {
        const std::string i = std::to_string(d);
        h += ",mean_x_" + i + ",delta_x_" + i + ",mean_p_" + i + ",delta_p_" + i +
             ",uncertainty_" + i;
    }
    return h;
}

inline std::string observables_csv_row(const ObservableReport& r) {
    std::string row = format_double(r.t) + "," + format_double(r.norm) + "," +
                      format_double(r.energy) + "," + format_double(r.axiom1_residual);
    for (std::size_t d = 0; d < r.mean_x.size(); ++d) {
        row += "," + format_double(r.mean_x[d]) + "," + format_double(r.delta_x[d]) + "," +
               format_double(r.mean_p[d]) + "," + format_double(r.delta_p[d]) + "," +
               format_double(r.uncertainty_product[d]);
    }
    return row;
}

inline void write_observables_csv(const std::filesystem::path& path,
                                  const std::vector<ObservableReport>& reports, int ndof) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << observables_csv_header(ndof) << "\n";
    for (const auto& r : reports) out << observables_csv_row(r) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

inline void write_f64(const std::filesystem::path& path, const RealField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    static_assert(sizeof(double) == 8);
    // Little-endian IEEE doubles, row-major dimension order.
    out.write(reinterpret_cast<const char*>(field.data()),
              static_cast<std::streamsize>(field.size() * sizeof(double)));
    if (!out) throw IoError("write failed for " + path.string());
}

inline RealField read_f64(const std::filesystem::path& path, std::size_t expected_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    RealField field(expected_size);
    in.read(reinterpret_cast<char*>(field.data()),
            static_cast<std::streamsize>(expected_size * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != expected_size * sizeof(double))
        throw IoError("short read from " + path.string());
    return field;
}

inline nlohmann::json grid_to_json(const GridSpec& g) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& a : g.axes())
        dims.push_back({{"x_min", a.x_min}, {"x_max", a.x_max}, {"n_points", a.n_points}});
    return {{"dims", dims}};
}

/// One snapshot = rho_NNNNNN.f64 + s_NNNNNN.f64 + snapshot_NNNNNN.json sidecar.
inline void write_snapshot(const std::filesystem::path& dir, long index, const HydroState& st,
                           const GridSpec& g) {
    char tag[16];
    std::snprintf(tag, sizeof(tag), "%06ld", index);
    const std::string rho_name = std::string("rho_") + tag + ".f64";
    const std::string s_name = std::string("s_") + tag + ".f64";
    write_f64(dir / rho_name, st.rho);
    write_f64(dir / s_name, st.s_residual);
    nlohmann::json side = {{"grid", grid_to_json(g)},
                           {"t", st.t},
                           {"k0", st.k0},
                           {"rho_file", rho_name},
                           {"s_file", s_name}};
    std::ofstream out(dir / (std::string("snapshot_") + tag + ".json"));
    if (!out) throw IoError("cannot write snapshot sidecar");
    out << side.dump(2) << "\n";
}

inline HydroState read_snapshot(const std::filesystem::path& sidecar_path, const GridSpec& g) {
    std::ifstream in(sidecar_path);
    if (!in) throw IoError("cannot open snapshot sidecar " + sidecar_path.string());
    nlohmann::json side;
    try {
        in >> side;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad snapshot sidecar: " + std::string(e.what()));
    }
    const auto dims = side.at("grid").at("dims");
    if (dims.size() != static_cast<std::size_t>(g.ndim()))
        throw ConfigError("snapshot grid does not match configured grid");
    for (int d = 0; d < g.ndim(); ++d) {
        if (dims[d].at("n_points").get<int>() != g.n(d) ||
            dims[d].at("x_min").get<double>() != g.x_min(d) ||
            dims[d].at("x_max").get<double>() != g.x_max(d))
            throw ConfigError("snapshot grid does not match configured grid");
    }
    HydroState st;
    st.t = side.at("t").get<double>();
    st.k0 = side.at("k0").get<std::vector<double>>();
    const auto dir = sidecar_path.parent_path();
    st.rho = read_f64(dir / side.at("rho_file").get<std::string>(), g.size());
    st.s_residual = read_f64(dir / side.at("s_file").get<std::string>(), g.size());
    return st;
}

}  // namespace lmd
