#include "wicklab/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "wicklab/cli/output.hpp"
#include "wicklab/wicklab.hpp"

namespace wicklab::cli {

namespace {

void need(bool ok, const std::string& key, const std::string& allowed, ErrorCode code = ErrorCode::config) {
    if (!ok) throw Error(code, "key " + key + " out of range: allowed " + allowed);
}

int int_in(const RunConfig& cfg, const std::string& key, long long lo, long long hi) {
    const long long v = cfg.integer(key);
    need(v >= lo && v <= hi, key, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

std::uint64_t seed_of(const RunConfig& cfg) {
    const long long v = cfg.integer("seed");
    need(v >= 0, "seed", "[0, 2^63)");
    return static_cast<std::uint64_t>(v);
}

double exponent_of(const RunConfig& cfg, const std::string& key) {
    const std::string v = cfg.text(key);
    if (v == "inf") return kInfinity;
    const double x = cfg.real(key);
    need(x == 1.0 || x == 2.0, key, "{1, 2, inf}");
    return x;
}

// Lattice modes |p| <= r with p1 > 0 or (p1 == 0, p2 >= 0), lexicographic.
std::vector<std::pair<int, int>> half_ball(int r) {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a <= r; ++a)
        for (int b = -r; b <= r; ++b)
            if (in_ball(a, b, r) && (a > 0 || b >= 0)) out.emplace_back(a, b);
    return out;
}

double explicit_hermite(int k, double x, double C) {
    double s = 0.0;
    double fact_k = 1.0;
    for (int i = 2; i <= k; ++i) fact_k *= i;
    for (int l = 0; 2 * l <= k; ++l) {
        double denom = 1.0;
        for (int i = 2; i <= l; ++i) denom *= i;
        for (int i = 2; i <= k - 2 * l; ++i) denom *= i;
        s += std::pow(-C / 2.0, l) * std::pow(x, k - 2 * l) / denom;
    }
    return fact_k * s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void hermite_check(const RunConfig& cfg, std::ostream& out) {
    const int kmax = int_in(cfg, "kmax", 0, 30);
    const double xmax = cfg.real("xmax");
    const double cmax = cfg.real("cmax");
    const double tol = cfg.real("tol");
    need(xmax >= 0.0, "xmax", "[0, inf)");
    need(cmax >= 0.0, "cmax", "[0, inf)");
    need(tol > 0.0, "tol", "(0, inf)");

    std::vector<double> xs;
    for (int i = -12; i <= 12; ++i) xs.push_back(xmax * i / 12.0);
    std::vector<double> cs;
    for (int i = 0; i <= 8; ++i) cs.push_back(cmax * i / 8.0);

    // identity -> per-k worst relative residual
    std::map<std::string, std::vector<double>> worst;
    for (const char* id : {"recurrence_vs_explicit", "binomial_shift", "inversion", "generating_function"})
        worst[id].assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    for (int k = 0; k <= kmax; ++k) {
        auto& w_rec = worst["recurrence_vs_explicit"][static_cast<std::size_t>(k)];
        auto& w_bin = worst["binomial_shift"][static_cast<std::size_t>(k)];
        auto& w_inv = worst["inversion"][static_cast<std::size_t>(k)];
        for (double C : cs) {
            const auto inv = hermite_inverse_coeffs(k, C);
            for (double x : xs) {
                w_rec = std::max(w_rec, rel(hermite_eval(k, x, C), explicit_hermite(k, x, C)));
                for (double y : {-1.0, 0.5}) {
                    double s = 0.0;
                    double b = 1.0;
                    for (int l = 0; l <= k; ++l) {
                        s += b * hermite_eval(l, x, C) * std::pow(y, k - l);
                        b = b * (k - l) / (l + 1);
                    }
                    w_bin = std::max(w_bin, rel(s, hermite_eval(k, x + y, C)));
                }
                double r = 0.0;
                for (int l = 0; 2 * l <= k; ++l) r += inv[static_cast<std::size_t>(l)] * hermite_eval(k - 2 * l, x, C);
                w_inv = std::max(w_inv, std::abs(r - std::pow(x, k)) / std::max(1.0, std::pow(std::abs(xmax), k)));
            }
        }
    }
    // Generating identity for |t| <= 1, series cut at the degree cap. At K = 30
    // the tail alone reaches 1.5e-8 for C = 4, |x| = 3.
    constexpr int kGenTerms = kMaxHermiteDegree;
    double w_gen = 0.0;
    for (double C : cs)
        for (double x : xs)
            for (double t : {-1.0, -0.5, 0.5, 1.0}) {
                const auto h = hermite_sequence(kGenTerms, x, C);
                double s = 0.0;
                double tk = 1.0;
                for (int k = 0; k <= kGenTerms; ++k) {
                    s += tk * h[static_cast<std::size_t>(k)];
                    tk *= t / (k + 1);
                }
                w_gen = std::max(w_gen, std::abs(s - std::exp(t * x - C * t * t / 2.0)));
            }

    CsvWriter csv({"identity", "k", "max_residual", "tol", "pass"});
    bool ok = true;
    for (const char* id : {"recurrence_vs_explicit", "binomial_shift", "inversion"})
        for (int k = 0; k <= kmax; ++k) {
            const double r = worst[id][static_cast<std::size_t>(k)];
            ok = ok && r <= tol;
            csv.cell(std::string(id)).cell(k).cell(r).cell(tol).cell(std::string(r <= tol ? "1" : "0"));
            csv.end_row();
        }
    ok = ok && w_gen <= tol;
    csv.cell(std::string("generating_function")).cell(kGenTerms).cell(w_gen).cell(tol).cell(std::string(w_gen <= tol ? "1" : "0"));
    csv.end_row();
    emit(cfg, csv, out);
    if (!ok) throw Error(ErrorCode::no_convergence, "a Hermite identity residual exceeds tol");
}

void simulate(const RunConfig& cfg, std::ostream& out) {
    const int n = int_in(cfg, "n", 0, 64);
    const int kmax = int_in(cfg, "kmax", 1, 8);
    const int replicas = int_in(cfg, "replicas", 1, 1000000);
    const double dt = cfg.real("dt");
    need(dt > 0.0, "dt", "(0, inf)");
    const int steps = int_in(cfg, "steps", 0, 100000);
    const int pmax = int_in(cfg, "pmax", 0, kmax * n);
    const std::uint64_t seed = seed_of(cfg);
    const auto modes = half_ball(pmax);
    const int P = exact_resolution(kmax * n);

    struct Row {
        double t;
        int k, p1, p2;
        cplx v;
    };
    std::vector<std::vector<Row>> slots(static_cast<std::size_t>(replicas));
    parallel_for(slots.size(), [&](std::size_t r) {
        auto state = stationary_sample(n, derive_seed(seed, r));
        auto& rows = slots[r];
        for (int s = 0; s <= steps; ++s) {
            if (s > 0) state.advance(dt);
            const auto w = wick_powers(state, kmax, P);
            for (int k = 1; k <= kmax; ++k) {
                const auto spectrum = wick_spectrum(w, k);
                for (auto [a, b] : modes) rows.push_back({state.t, k, a, b, spectrum.at(a, b)});
            }
        }
    });
    CsvWriter csv({"replica", "t", "k", "p1", "p2", "re", "im"});
    for (std::size_t r = 0; r < slots.size(); ++r)
        for (const auto& row : slots[r]) {
            csv.cell(static_cast<long long>(r)).cell(row.t).cell(row.k).cell(row.p1).cell(row.p2);
            csv.cell(row.v.real()).cell(row.v.imag());
            csv.end_row();
        }
    emit(cfg, csv, out);
}

void wick_cov(const RunConfig& cfg, std::ostream& out) {
    const int n = int_in(cfg, "n", 0, 32);
    const int kmax = int_in(cfg, "kmax", 1, 6);
    const double dt = cfg.real("dt");
    need(dt >= 0.0, "dt", "[0, inf)");
    const int pmax = int_in(cfg, "pmax", 0, kmax * n);
    const int replicas = int_in(cfg, "replicas", 0, 10000000);
    const std::uint64_t seed = seed_of(cfg);
    const auto modes = half_ball(pmax);

    std::vector<LatticeKernel> kernels;
    for (int k = 1; k <= kmax; ++k) kernels.push_back(wick_covariance_kernel(n, k, dt));

    // slot[r][(k-1) * modes + i] = Re(<Z^k(0), e_p> conj(<Z^k(dt), e_p>))
    const std::size_t width = static_cast<std::size_t>(kmax) * modes.size();
    std::vector<std::vector<double>> slots(static_cast<std::size_t>(replicas));
    if (replicas > 0) {
        const int P = exact_resolution(kmax * n);
        parallel_for(slots.size(), [&](std::size_t r) {
            const auto s0 = stationary_sample(n, derive_seed(seed, r));
            const auto w0 = wick_powers(s0, kmax, P);
            const auto w1 = dt > 0.0 ? wick_powers(evolve(s0, dt), kmax, P) : w0;
            auto& v = slots[r];
            v.reserve(width);
            for (int k = 1; k <= kmax; ++k) {
                const auto a = wick_spectrum(w0, k);
                const auto b = wick_spectrum(w1, k);
                for (auto [p1, p2] : modes) v.push_back((a.at(p1, p2) * std::conj(b.at(p1, p2))).real());
            }
        });
    }
    std::vector<std::string> header{"k", "p1", "p2", "dt", "analytic"};
    if (replicas > 0) {
        header.push_back("mc_mean");
        header.push_back("mc_stderr");
    }
    CsvWriter csv(header);
    for (int k = 1; k <= kmax; ++k)
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto [p1, p2] = modes[i];
            csv.cell(k).cell(p1).cell(p2).cell(dt).cell(kernels[static_cast<std::size_t>(k - 1)].at(p1, p2));
            if (replicas > 0) {
                RunningStats st;
                for (const auto& v : slots) st.add(v[static_cast<std::size_t>(k - 1) * modes.size() + i]);
                csv.cell(st.mean()).cell(st.std_error());
            }
            csv.end_row();
        }
    emit(cfg, csv, out);
}

void besov(const RunConfig& cfg, std::ostream& out) {
    const double s = cfg.real("s");
    const double p = exponent_of(cfg, "p");
    const double q = exponent_of(cfg, "q");
    SpectralField f;
    if (const auto path = cfg.text("input"); !path.empty()) {
        f = load_spectral(path);
    } else {
        const int n = int_in(cfg, "n", 0, 256);
        f = stationary_sample(n, seed_of(cfg)).modes;
    }
    const auto part = DyadicPartition::for_radius(f.radius());
    CsvWriter csv({"block", "lp_norm", "weighted"});
    for (int k = -1; k <= part.kmax(); ++k) {
        const double b = lp_norm(lp_block(f, part, k), p);
        csv.cell(k).cell(b).cell(std::exp2(s * k) * b);
        csv.end_row();
    }
    const double norm = besov_norm(f, s, p, q, part);
    csv.cell(std::string("total")).cell(lp_norm(f, p)).cell(norm);
    csv.end_row();
    emit(cfg, csv, out);
    if (!cfg.output().empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", norm);
        out << "besov_norm=" << buf << "\n";
    }
}

void kernel_decay(const RunConfig& cfg, std::ostream& out) {
    const auto ns = cfg.int_list("n-list");
    need(ns.size() >= 2, "n-list", "at least two truncations");
    for (int n : ns) need(n >= 1 && n <= 128, "n-list", "entries in [1, 128]");
    const int ratio = int_in(cfg, "M-ratio", 1, 8);
    const int k = int_in(cfg, "k", 0, 4);
    const int l = int_in(cfg, "l", 0, 4);
    need(k + l >= 1, "k", "k + l >= 1");
    const double alpha = cfg.real("alpha");
    const double dt = cfg.real("dt");
    std::vector<double> xs, gaps;
    for (int n : ns) {
        xs.push_back(n);
        gaps.push_back(block_weighted_gap(n, ratio * n, k, l, dt, alpha));
    }
    bool positive = true;
    for (double g : gaps) positive = positive && g > 0.0;
    const double slope = positive ? loglog_slope(xs, gaps) : std::nan("");
    CsvWriter csv({"n", "M", "gap", "fitted_slope"});
    for (std::size_t i = 0; i < ns.size(); ++i) {
        csv.cell(ns[i]).cell(ratio * ns[i]).cell(gaps[i]).cell(slope);
        csv.end_row();
    }
    emit(cfg, csv, out);
}

void match_moments_cmd(const RunConfig& cfg, std::ostream& out) {
    const int N = int_in(cfg, "N", 1, 4);
    const double a0 = cfg.real("a0");
    need(a0 > 0.0 && a0 < 1.0, "a0", "(0, 1)");
    const double tol = cfg.real("tol");
    need(tol > 0.0, "tol", "(0, inf)");
    const auto prof = match_moments(N, a0, tol);
    const auto targets = moment_targets(N);
    std::vector<OutputFile> extra;
    if (const auto path = cfg.text("profile"); !path.empty())
        extra.push_back(write_output(path, to_json(prof.field).dump(1) + "\n"));
    CsvWriter csv({"k", "target", "residual"});
    for (int k = 1; k <= 2 * N; ++k) {
        csv.cell(k).cell(targets[static_cast<std::size_t>(k)]).cell(prof.residuals[static_cast<std::size_t>(k)]);
        csv.end_row();
    }
    emit(cfg, csv, out, extra);
}

void support_demo(const RunConfig& cfg, std::ostream& out) {
    const auto ns = cfg.int_list("n-list");
    for (int n : ns) need(n >= 3 && n <= 64, "n-list", "entries in [3, 64]");
    const int ratio = int_in(cfg, "M-ratio", 1, 8);
    const double R = cfg.real("R");
    need(R >= 0.0, "R", "[0, inf)");
    const int kmax = int_in(cfg, "kmax", 1, 6);
    const double alpha = cfg.real("alpha");
    need(alpha > 0.0, "alpha", "(0, inf)");
    const int seeds = int_in(cfg, "seeds", 2, 100000);
    const std::uint64_t seed = seed_of(cfg);
    const auto profile = match_moments(2, 0.05, 1e-8);

    CsvWriter csv({"n", "M", "l_n", "C_n", "k", "mean_distance", "stderr"});
    for (int n : ns) {
        std::vector<DriverDistance> slots(static_cast<std::size_t>(seeds));
        parallel_for(slots.size(), [&](std::size_t i) {
            slots[i] = shifted_driver_distance(n, ratio * n, R, kmax, alpha, profile, derive_seed(seed, i));
        });
        for (int k = 1; k <= kmax; ++k) {
            RunningStats st;
            for (const auto& d : slots) st.add(d.distance[static_cast<std::size_t>(k)]);
            csv.cell(n).cell(ratio * n).cell(slots.front().l_n).cell(slots.front().C_n).cell(k);
            csv.cell(st.mean()).cell(st.std_error());
            csv.end_row();
        }
    }
    emit(cfg, csv, out);
}

void gmc_demo(const RunConfig& cfg, std::ostream& out) {
    const int n = int_in(cfg, "n", 0, 32);
    const double gamma = cfg.real("gamma");
    const double beta = cfg.real("beta");
    try {
        check_phase(gamma);
    } catch (const Error&) {
        need(false, "gamma", "gamma^2 < 8 pi, |gamma| < 5.0132565", ErrorCode::phase);
    }
    try {
        check_phase(gamma, beta);
    } catch (const Error&) {
        need(false, "beta", "(gamma^2 / 8 pi, 1) = (" + format_real(gamma * gamma / kCriticalGammaSquared) + ", 1)",
             ErrorCode::phase);
    }
    const int replicas = int_in(cfg, "replicas", 2, 10000000);
    const std::uint64_t seed = seed_of(cfg);

    const auto series = gmc_second_moment_series(n, gamma, beta);
    struct Slot {
        double norm2 = 0.0;
        bool positive = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(replicas));
    parallel_for(slots.size(), [&](std::size_t i) {
        const auto c = wick_exponential(gff_sample(n, derive_seed(seed, i)), gamma);
        slots[i] = {grid_sobolev_norm_squared(c.grid, beta), positivity_check(c)};
    });
    RunningStats st;
    std::size_t pos = 0;
    for (const auto& s : slots) {
        st.add(s.norm2);
        pos += s.positive ? 1 : 0;
    }

    CsvWriter csv({"quantity", "N", "M", "value", "stderr"});
    csv.cell(std::string("second_moment_analytic")).cell(n).cell(n).cell(series.value).cell(series.tail_bound);
    csv.end_row();
    csv.cell(std::string("second_moment_mc")).cell(n).cell(n).cell(st.mean()).cell(st.std_error());
    csv.end_row();
    for (int N : {2, 4, 8}) {
        csv.cell(std::string("gap_to_one")).cell(N).cell(2 * N).cell(gmc_gap_to_one(N, 2 * N, gamma, beta)).cell(0.0);
        csv.end_row();
    }
    csv.cell(std::string("positivity_rate")).cell(n).cell(n).cell(double(pos) / double(replicas)).cell(0.0);
    csv.end_row();
    emit(cfg, csv, out);
}

const std::map<std::string, std::function<void(const RunConfig&, std::ostream&)>>& dispatch() {
    static const std::map<std::string, std::function<void(const RunConfig&, std::ostream&)>> table{
        {"hermite-check", hermite_check}, {"simulate", simulate},
        {"wick-cov", wick_cov},           {"besov", besov},
        {"kernel-decay", kernel_decay},   {"match-moments", match_moments_cmd},
        {"support-demo", support_demo},   {"gmc-demo", gmc_demo},
    };
    return table;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
        else if (c == '"') c = '\'';
    return s;
}

} // namespace

int exit_code(ErrorCode code) { return code == ErrorCode::no_convergence ? 3 : 2; }

void run(const RunConfig& cfg, std::ostream& out) {
    const auto it = dispatch().find(cfg.command);
    require(it != dispatch().end(), ErrorCode::config, "unknown command '" + cfg.command + "'");
    it->second(cfg, out);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_config(args);
        if (!cfg.help_text.empty()) {
            out << cfg.help_text;
            return 0;
        }
        run(cfg, out);
        return 0;
    } catch (const Error& e) {
        err << "error: code=" << to_string(e.code()) << " message=\"" << one_line(e.what()) << "\"\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: code=E_INTERNAL message=\"" << one_line(e.what()) << "\"\n";
        return 1;
    }
}

} // namespace wicklab::cli
