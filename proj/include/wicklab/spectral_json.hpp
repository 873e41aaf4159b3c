#pragma once

// On-disk form of a SpectralField:
//   {"n": int, "hermitian": bool, "coeffs": [[m1, m2, re, im], ...]}
// with every lattice point |m| <= n listed in lexicographic (m1, m2) order.

#include <fstream>
#include <string>

#include <json.hpp>

#include "wicklab/torus_fourier.hpp"

namespace wicklab {

inline nlohmann::json to_json(const SpectralField& f) {
    nlohmann::json coeffs = nlohmann::json::array();
    f.for_each_mode([&](int m1, int m2, cplx v) {
        coeffs.push_back({m1, m2, v.real(), v.imag()});
    });
    return {{"n", f.radius()}, {"hermitian", f.hermitian()}, {"coeffs", std::move(coeffs)}};
}

inline SpectralField spectral_from_json(const nlohmann::json& j) {
    try {
        const int n = j.at("n").get<int>();
        const bool herm = j.at("hermitian").get<bool>();
        SpectralField f(n, false);
        for (const auto& row : j.at("coeffs")) {
            require(row.is_array() && row.size() == 4, ErrorCode::io,
                    "coefficient rows must be [m1, m2, re, im]");
            const int m1 = row[0].get<int>();
            const int m2 = row[1].get<int>();
            require(in_ball(m1, m2, n), ErrorCode::io,
                    "coefficient (" + std::to_string(m1) + "," + std::to_string(m2) +
                        ") outside radius " + std::to_string(n));
            f.raw(m1, m2) = {row[2].get<double>(), row[3].get<double>()};
        }
        if (herm) {
            require(f.is_exactly_hermitian(), ErrorCode::io,
                    "field flagged hermitian but a_{-m} != conj(a_m)");
            f.symmetrize();
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::io, std::string("malformed spectral field json: ") + e.what());
    }
}

inline void save_spectral(const SpectralField& f, const std::string& path) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorCode::io, "cannot open " + path + " for writing");
    os << to_json(f).dump(1) << '\n';
}

inline SpectralField load_spectral(const std::string& path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorCode::io, "cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::io, std::string("cannot parse ") + path + ": " + e.what());
    }
    return spectral_from_json(j);
}

} // namespace wicklab
