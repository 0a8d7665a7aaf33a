#include "striate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "striate/holder_norms.hpp"
#include "striate/kernels.hpp"

namespace striate {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " is not a number: " + v);
    }
    if (used != v.size() || !std::isfinite(x)) throw ConfigError("config: " + key + " is not a number: " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError("config: " + key + " must be an integer: " + v);
    return (long long)x;
}

// split "a, b(1, 2), c" at top-level commas
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

// "name(1, 2)" -> name, {1, 2}; "name" -> name, {}
std::pair<std::string, std::vector<std::string>> call_form(const std::string& s) {
    auto open = s.find('(');
    if (open == std::string::npos) return {trim(s), {}};
    if (s.back() != ')') throw ConfigError("config: unbalanced parentheses in " + s);
    auto args = split_list(s.substr(open + 1, s.size() - open - 2));
    return {trim(s.substr(0, open)), args};
}

std::vector<double> numbers(const std::string& what, const std::vector<std::string>& args) {
    std::vector<double> v;
    for (auto& a : args) v.push_back(to_double(what, a));
    return v;
}

constexpr double kTwoPi = 6.283185307179586;

}  // namespace

// ---------------------------------------------------------------- config

ProfileSpec parse_profile(const std::string& s) {
    auto [name, args] = call_form(s);
    ProfileSpec p;
    p.kind = name;
    auto need = [&](std::size_t n) {
        if (args.size() != n) throw ConfigError("profile " + name + ": expected " + std::to_string(n) + " arguments");
    };
    if (name == "patch" || name == "bump") {
        need(1);
        p.args = numbers("profile", args);
        if (!(p.args[0] > 0)) throw ConfigError("profile " + name + ": radius must be positive");
    } else if (name == "ring") {
        need(2);
        p.args = numbers("profile", args);
        if (!(p.args[0] > 0 && p.args[1] > p.args[0])) throw ConfigError("profile ring: need 0 < r0 < r1");
    } else if (name == "perturbed") {
        need(2);
        p.args = numbers("profile", args);
        if (!(p.args[0] >= 0 && p.args[0] < 0.5)) throw ConfigError("profile perturbed: amplitude must lie in [0, 0.5)");
        if (p.args[1] < 1 || p.args[1] != std::floor(p.args[1]))
            throw ConfigError("profile perturbed: mode must be a positive integer");
    } else if (name == "zero") {
        need(0);
    } else if (name == "shear") {
        need(1);
        p.file = args[0];
    } else {
        throw ConfigError("unknown profile: " + name);
    }
    return p;
}

void RunConfig::validate() const {
    if (N < 64 || N > 1024 || (N & (N - 1)) != 0) throw ConfigError("config: N must be a power of two in [64, 1024]");
    if (!(L > 0)) throw ConfigError("config: L must be positive");
    if (!(alpha > 0 && alpha < 1)) throw ConfigError("config: alpha must lie in (0, 1)");
    if (!(dt > 0) || !(T > 0)) throw ConfigError("config: dt and T must be positive");
    double steps = T / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) throw ConfigError("config: T must be a multiple of dt");
    if (eps < 0 || (eps > 0 && eps < h())) throw ConfigError("config: eps must be at least one grid spacing");
    if (blob < 0) throw ConfigError("config: blob must be positive");
    if (!(partition_R > 2 * h())) throw ConfigError("config: partition_R must exceed two grid spacings");
    if (cadence < 1) throw ConfigError("config: cadence must be at least 1");
    if (!(volume_tol > 0)) throw ConfigError("config: volume_tol must be positive");
    if (curve_points < 8) throw ConfigError("config: curve_points must be at least 8");
    if (family.empty()) throw ConfigError("config: family is empty");
    parse_profile(profile);
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (v.empty()) throw ConfigError("config: empty value for " + k);
        if (seen[k]++) throw ConfigError("config: duplicate key " + k);
        if (k == "N") c.N = int(to_int(k, v));
        else if (k == "L") c.L = to_double(k, v);
        else if (k == "alpha") c.alpha = to_double(k, v);
        else if (k == "dt") c.dt = to_double(k, v);
        else if (k == "T") c.T = to_double(k, v);
        else if (k == "profile") c.profile = v;
        else if (k == "family") c.family = split_list(v);
        else if (k == "eps") c.eps = to_double(k, v);
        else if (k == "blob") c.blob = to_double(k, v);
        else if (k == "partition_R") c.partition_R = to_double(k, v);
        else if (k == "cadence") c.cadence = int(to_int(k, v));
        else if (k == "seed") {
            long long s = to_int(k, v);
            if (s < 0) throw ConfigError("config: seed must be nonnegative");
            c.seed = std::uint64_t(s);
        } else if (k == "volume_tol") c.volume_tol = to_double(k, v);
        else if (k == "curve_points") c.curve_points = int(to_int(k, v));
        else if (k == "output") c.output = v;
        else throw ConfigError("config: unknown key " + k);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "[grid]\nN = " << c.N << "\nL = " << c.L << "\n\n";
    os << "[oracles]\nprofile = " << c.profile << "\n\n";
    os << "[striated_algebra]\nfamily = ";
    for (std::size_t k = 0; k < c.family.size(); ++k) os << (k ? ", " : "") << c.family[k];
    os << "\npartition_R = " << c.partition_R << "\n\n";
    os << "[flow_transport]\ndt = " << c.dt << "\neps = " << c.eps_value() << "\nblob = " << c.blob_value()
       << "\nvolume_tol = " << c.volume_tol << "\n\n";
    os << "[experiments_cli]\nT = " << c.T << "\nalpha = " << c.alpha << "\ncadence = " << c.cadence
       << "\nseed = " << c.seed << "\ncurve_points = " << c.curve_points << "\n";
    if (!c.output.empty()) os << "output = " << c.output << "\n";
    return os.str();
}

// ---------------------------------------------------------------- initial data

namespace {

struct Level {
    double value;
    Vec2 grad;
};
using LevelFn = std::function<Level(Vec2)>;

LevelFn circle(double R) {
    return [R](Vec2 x) {
        double r = norm(x);
        return Level{r - R, r > 0 ? x / r : Vec2{}};
    };
}

// r - (1 + a cos k theta)
LevelFn wavy(double a, double k) {
    return [a, k](Vec2 x) {
        double r = norm(x);
        if (r == 0) return Level{-1 - a, {}};
        double th = std::atan2(x.y, x.x);
        double rho = 1 + a * std::cos(k * th), drho = -a * k * std::sin(k * th);
        Vec2 er = x / r, et = perp(er);
        return Level{r - rho, er - (drho / r) * et};
    };
}

// C-infinity step: 1 on s <= 1, 0 on s >= 2
double step(double s) {
    if (s <= 1) return 1;
    if (s >= 2) return 0;
    double a = std::exp(-1 / (2 - s)), b = std::exp(-1 / (s - 1));
    return a / (a + b);
}

double step_deriv(double s) {
    if (s <= 1 || s >= 2) return 0;
    double p = 2 - s, q = s - 1;
    double a = std::exp(-1 / p), b = std::exp(-1 / q);
    double da = -a / (p * p), db = b / (q * q);
    return (da * b - a * db) / ((a + b) * (a + b));
}

// (1 - exp(-r^2/0.05)) grad^perp phi
VectorFn tangent_member(LevelFn phi) {
    return [phi](Vec2 x) {
        double q = norm2(x);
        if (q == 0) return Vec2{};
        double c = -std::expm1(-q / 0.05);
        return c * perp(phi(x).grad);
    };
}

// grad^perp(-x2 prod_j (1 - chi(|phi_j| / w)))
VectorFn band_member(std::vector<LevelFn> bounds, double w) {
    return [bounds, w](Vec2 x) {
        std::vector<double> one(bounds.size());
        std::vector<Vec2> dchi(bounds.size());
        double P = 1;
        for (std::size_t j = 0; j < bounds.size(); ++j) {
            Level l = bounds[j](x);
            double s = std::abs(l.value) / w;
            one[j] = 1 - step(s);
            dchi[j] = (step_deriv(s) / w * (l.value >= 0 ? 1 : -1)) * l.grad;
            P *= one[j];
        }
        Vec2 dP{};
        for (std::size_t j = 0; j < bounds.size(); ++j) {
            double rest = 1;
            for (std::size_t i = 0; i < bounds.size(); ++i)
                if (i != j) rest *= one[i];
            dP -= rest * dchi[j];
        }
        Vec2 dpsi = Vec2{0, -P} - x.y * dP;
        return perp(dpsi);
    };
}

// grad^perp(-x2 chi(r / (r1/2))), supported in |x| < r1
VectorFn core_member(double r1) {
    return [r1](Vec2 x) {
        double r = norm(x), s = r / (0.5 * r1);
        double chi = step(s), d = r > 0 ? step_deriv(s) / (0.5 * r1) : 0.0;
        Vec2 dpsi = Vec2{0, -chi} - (x.y * d) * (r > 0 ? x / r : Vec2{});
        return perp(dpsi);
    };
}

Vec2 smooth_member(Vec2 x) {
    double e = std::exp(-norm2(x));
    return {e * (1 + x.x), 0.5 * e * x.y + 0.3};
}

}  // namespace

InitialData initial_data(const RunConfig& c) {
    c.validate();
    InitialData d;
    d.grid = Grid2D::centered(c.N, c.L);
    const Grid2D& g = d.grid;
    const double eps = c.eps_value();
    ProfileSpec p = parse_profile(c.profile);
    LevelFn main_level = circle(0);
    std::vector<LevelFn> bounds;
    double support = 0;
    if (p.kind == "patch" || p.kind == "ring") {
        RadialProfile base = p.kind == "patch" ? RadialProfile::patch(p.args[0]) : RadialProfile::ring(p.args[0], p.args[1]);
        d.radial = base.mollified(eps);
        const RadialProfile& pm = *d.radial;
        d.omega0_fn = [pm](Vec2 x) { return pm.g(norm(x)); };
        d.omega0 = sample<double>(g, d.omega0_fn);
        support = p.args.back() + eps;
        if (p.kind == "patch") main_level = circle(p.args[0]);
        for (double r : p.args) bounds.push_back(circle(r));
        double R = p.args.back();
        for (int k = 0; k < c.curve_points; ++k) {
            double th = kTwoPi * k / c.curve_points;
            d.curve0.push_back({R * std::cos(th), R * std::sin(th)});
        }
    } else if (p.kind == "bump") {
        double R = p.args[0];
        d.omega0_fn = [R](Vec2 x) { return bump(2 * norm(x) / R); };
        d.omega0 = sample<double>(g, d.omega0_fn);
        support = R;
    } else if (p.kind == "perturbed") {
        double a = p.args[0], k = p.args[1];
        main_level = wavy(a, k);
        bounds.push_back(main_level);
        d.omega0 = mollify(cell_average(g, [a, k](Vec2 x) {
                               double th = std::atan2(x.y, x.x);
                               return norm(x) < 1 + a * std::cos(k * th) ? 1.0 : 0.0;
                           }),
                           eps);
        support = 1 + a + eps;
        for (int q = 0; q < c.curve_points; ++q) {
            double th = kTwoPi * q / c.curve_points, rho = 1 + a * std::cos(k * th);
            d.curve0.push_back({rho * std::cos(th), rho * std::sin(th)});
        }
    } else if (p.kind == "zero") {
        d.omega0_fn = [](Vec2) { return 0.0; };
        d.omega0 = ScalarField(g);
    } else {
        throw ConfigError("profile " + p.kind + " is an identity oracle only; it has no L1 vorticity to run");
    }
    if (support >= c.L) throw ConfigError("config: vorticity support does not fit inside the box");
    d.omega0_linf = linf(d.omega0);

    for (const auto& m : c.family) {
        auto [name, args] = call_form(m);
        auto v = numbers("family", args);
        if (name == "tangent" && v.empty()) d.family.push_back(tangent_member(main_level));
        else if (name == "band" && v.size() <= 1) {
            double w = v.empty() ? 0.25 : v[0];
            if (!(w > 0)) throw ConfigError("family band: width must be positive");
            d.family.push_back(band_member(bounds, w));
        } else if (name == "core" && v.size() <= 1) {
            double r1 = v.empty() ? 0.8 : v[0];
            if (!(r1 > 0)) throw ConfigError("family core: radius must be positive");
            d.family.push_back(core_member(r1));
        } else if (name == "smooth" && v.empty()) d.family.push_back(smooth_member);
        else if (name == "e1" && v.empty()) d.family.push_back([](Vec2) { return Vec2{1, 0}; });
        else throw ConfigError("unknown family member: " + m);
        d.member_names.push_back(m);
    }
    return d;
}

// ---------------------------------------------------------------- diagnostics rows

const std::vector<std::string>& DiagnosticsRow::header() {
    static const std::vector<std::string> h{
        "t",
        "gradu_linf[exp]",
        "u_linf[omega_L1_Linf]",
        "V[V_eps_initial_omega]",
        "V_current[V_current_omega]",
        "Y_calpha[double_exp]",
        "divY_calpha[div_double_exp]",
        "div_omegaY_neg[double_exp]",
        "Ygradu_calpha[double_exp]",
        "grad_eta_linf[double_exp]",
        "grad_eta_inv_linf[double_exp]",
        "IY[inverse_double_exp_lower]",
        "A_calpha[A_double_exp]",
        "corrected_calpha[A_double_exp]",
        "boundary_c1alpha[level_curve_double_exp]",
        "omega_l1[conserved]",
        "omega_l2[conserved]",
        "omega_linf[conserved]",
        "volume_drift[det_grad_eta_one]",
    };
    return h;
}

std::vector<double> DiagnosticsRow::values() const {
    return {t,           gradu_linf,       u_linf,           V,        V_current,  Y_calpha,   divY_calpha,
            div_omegaY_neg, Ygradu_calpha, grad_eta,         grad_eta_inv, IY,     A_calpha,   corrected_calpha,
            boundary_c1alpha, omega_l1,    omega_l2,         omega_linf, volume_drift};
}

std::string csv_line(const std::vector<double>& values) {
    std::string out;
    char buf[40];
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", values[k]);
        if (k) out += ',';
        out += buf;
    }
    return out;
}

std::string csv_header() {
    std::string out;
    for (const auto& h : DiagnosticsRow::header()) out += (out.empty() ? "" : ",") + h;
    return out;
}

std::string to_csv(const std::vector<DiagnosticsRow>& rows) {
    std::string out = csv_header() + "\n";
    for (const auto& r : rows) out += csv_line(r.values()) + "\n";
    return out;
}

namespace {

std::vector<Vec2> points_of(const Grid2D& g) {
    std::vector<Vec2> p(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) p[k] = g.point(k);
    return p;
}

// eta(t, x) at arbitrary reference points, from the marker displacement
std::vector<Vec2> carry(const FlowState& s, const std::vector<Vec2>& pts) {
    const Grid2D& g = s.grid();
    VectorField disp(g);
    for (std::size_t k = 0; k < g.size(); ++k) disp[k] = s.markers[k] - g.point(k);
    std::vector<Vec2> out(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = pts[k] + interp_cubic(disp, pts[k]);
    return out;
}

}  // namespace

void check_row(const DiagnosticsRow& r) {
    auto v = r.values();
    const auto& h = DiagnosticsRow::header();
    for (std::size_t k = 0; k < v.size(); ++k)
        if (!std::isfinite(v[k])) {
            std::ostringstream os;
            os << "run: non-finite " << h[k] << " at t = " << r.t;
            throw NumericalAbort(os.str());
        }
}

RunResult run(const RunConfig& c, const RowHook& hook) {
    InitialData data = initial_data(c);
    const Grid2D& g = data.grid;
    FlowState s = initial_state(g);
    BlobVelocity u(s, data.omega0, c.blob_value());
    AdvanceOptions adv;
    adv.volume_tol = c.volume_tol;
    HolderOptions hopt;
    hopt.seed = c.seed;
    hopt.mode = PairMode::Sampled;

    const int nsteps = int(std::lround(c.T / c.dt));
    const int stride = std::max(1, int(std::lround(1.0 / (c.cadence * c.dt))));
    const std::vector<int> snap_steps{0, nsteps / 2, nsteps};

    std::vector<VectorField> family0;
    for (const auto& Y0 : data.family) family0.push_back(sample<Vec2>(g, Y0));
    RunResult res;
    res.I0 = family_infimum(family0);
    Partition2D P = partition_of_unity_2d(c.partition_R, g);
    std::vector<int> labels = select_members(family0, P, res.I0);
    const auto pts = points_of(g);

    if (!c.output.empty()) {
        std::filesystem::create_directories(c.output);
        std::ofstream(c.output + "/config.txt") << to_text(c);
        std::ofstream(c.output + "/partition.txt") << P.manifest(&labels);
    }

    auto check_cfl = [&] {
        u.prepare(s);
        double umax = 0;
        for (const auto& x : s.markers.v) umax = std::max(umax, norm(u.at(s.t, x)));
        if (umax > 0 && c.dt > 0.5 * g.h / umax) {
            std::ostringstream os;
            os << "run: dt = " << c.dt << " violates the CFL limit " << 0.5 * g.h / umax << " at t = " << s.t;
            throw ConfigError(os.str());
        }
    };

    auto make_row = [&](int step) {
        if (s.t > 0) compute_inverse(s, u);
        u.prepare(s);
        ScalarField omega = data.omega0_fn ? transport_scalar(data.omega0_fn, s) : transport_scalar(data.omega0, s);
        std::vector<VectorField> fam;
        for (const auto& Y0 : data.family) fam.push_back(s.t > 0 ? pushforward(Y0, s) : sample<Vec2>(g, Y0));

        DiagnosticsRow r;
        r.t = s.t;
        VorticityField W(omega);
        GradVelocityField G = grad_velocity(W, pts);
        double pv = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            r.gradu_linf = std::max(r.gradu_linf, opnorm(G.grad[k]));
            pv = std::max(pv, opnorm(G.sym[k]));
            r.u_linf = std::max(r.u_linf, norm(u.at(s.t, pts[k])));
        }
        r.V = data.omega0_linf + pv;
        r.V_current = linf(omega) + pv;
        MatrixField gradU(g);
        gradU.v = G.grad;
        for (const auto& Y : fam) {
            r.Y_calpha = std::max(r.Y_calpha, holder_report(Y, c.alpha, hopt).norm());
            r.divY_calpha = std::max(r.divY_calpha, holder_report(divergence(Y), c.alpha, hopt).norm());
            VectorField wY(g), Yg(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                wY[k] = omega[k] * Y[k];
                Yg[k] = gradU[k] * Y[k];
            }
            r.div_omegaY_neg = std::max(r.div_omegaY_neg, neg_holder_estimate(wY, c.alpha, nullptr, hopt).value);
            r.Ygradu_calpha = std::max(r.Ygradu_calpha, holder_report(Yg, c.alpha, hopt).norm());
        }
        r.grad_eta = grad_eta_linf(s);
        r.grad_eta_inv = s.t > 0 ? grad_eta_inv_linf(s) : 1.0;
        r.IY = family_infimum(fam);
        MatrixField A = correction_matrix_2d(fam, P, labels, &s.inv);
        r.A_calpha = holder_report(A, c.alpha, hopt).norm();
        r.corrected_calpha = holder_report(corrected_gradient(gradU, omega, A), c.alpha, hopt).norm();
        if (!data.curve0.empty()) r.boundary_c1alpha = curve_c1alpha_norm(carry(s, data.curve0), c.alpha);
        r.omega_l1 = lp_norm(omega, 1);
        r.omega_l2 = lp_norm(omega, 2);
        r.omega_linf = linf(omega);
        r.volume_drift = volume_drift(s);
        check_row(r);
        res.rows.push_back(r);

        if (!c.output.empty()) {
            auto it = std::find(snap_steps.begin(), snap_steps.end(), step);
            if (it != snap_steps.end()) {
                std::string tag = "_t" + std::to_string(it - snap_steps.begin());
                write_snapshot(c.output + "/omega" + tag + ".snap", to_snapshot(omega));
                for (std::size_t m = 0; m < fam.size(); ++m)
                    write_snapshot(c.output + "/member" + std::to_string(m) + tag + ".snap", to_snapshot(fam[m]));
            }
        }
        if (hook) hook(RunView{c, data, s, u, omega, fam, r});
    };

    check_cfl();
    for (int step = 0;; ++step) {
        bool snap = std::find(snap_steps.begin(), snap_steps.end(), step) != snap_steps.end();
        if (step % stride == 0 || step == nsteps || (snap && !c.output.empty())) make_row(step);
        if (step == nsteps) break;
        advance(s, u, c.dt, adv);
        if ((step + 1) % stride == 0) check_cfl();
    }
    if (!c.output.empty()) std::ofstream(c.output + "/diagnostics.csv") << to_csv(res.rows);
    return res;
}

// ---------------------------------------------------------------- envelopes

double EnvelopeFit::envelope(double t) const {
    if (shape == EnvelopeShape::exp) return prefactor * std::exp(rate * t);
    return prefactor * std::exp(rate * std::exp(rate * t));
}

EnvelopeFit envelope_fit(const std::vector<double>& t, const std::vector<double>& y, EnvelopeShape shape,
                         double slack) {
    const std::size_t n = t.size();
    if (n < 4 || y.size() != n) throw ConfigError("envelope_fit: need at least 4 samples");
    bool decreasing = true;
    for (std::size_t k = 1; k < n; ++k) decreasing = decreasing && y[k] < y[k - 1];
    if (decreasing) throw ConfigError("envelope_fit: growth envelope requested on strictly decreasing data");
    const std::size_t m = std::max<std::size_t>(2, (n + 3) / 4);
    EnvelopeFit f;
    f.shape = shape;
    f.slack = slack;
    bool positive = true;
    for (std::size_t k = 0; k < m; ++k) positive = positive && y[k] > 0;
    if (!positive) {
        f.rate = 0;
        for (std::size_t k = 0; k < m; ++k) f.prefactor = std::max(f.prefactor, y[k]);
    } else {
        std::vector<double> ly(m);
        for (std::size_t k = 0; k < m; ++k) ly[k] = std::log(y[k]);
        // g(t) is the time profile of log y for a trial rate
        auto profile = [&](double c, double tk) { return shape == EnvelopeShape::exp ? c * tk : c * std::exp(c * tk); };
        auto residual = [&](double c) {
            double a = 0;
            for (std::size_t k = 0; k < m; ++k) a += ly[k] - profile(c, t[k]);
            a /= double(m);
            double r = 0;
            for (std::size_t k = 0; k < m; ++k) r += std::pow(ly[k] - a - profile(c, t[k]), 2);
            return r;
        };
        if (shape == EnvelopeShape::exp) {
            double tm = 0, lm = 0;
            for (std::size_t k = 0; k < m; ++k) {
                tm += t[k];
                lm += ly[k];
            }
            tm /= double(m);
            lm /= double(m);
            double num = 0, den = 0;
            for (std::size_t k = 0; k < m; ++k) {
                num += (t[k] - tm) * (ly[k] - lm);
                den += (t[k] - tm) * (t[k] - tm);
            }
            f.rate = den > 0 ? std::max(0.0, num / den) : 0.0;
        } else {
            // residual is not convex in the rate: scan, then refine around the best cell
            double best = 0, rbest = residual(0);
            for (int i = 1; i <= 4000; ++i) {
                double c = 0.005 * i, r = residual(c);
                if (r < rbest) {
                    rbest = r;
                    best = c;
                }
            }
            double lo = std::max(0.0, best - 0.005), hi = best + 0.005;
            for (int it = 0; it < 100; ++it) {
                double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
                if (residual(a) < residual(b)) hi = b;
                else lo = a;
            }
            double c = 0.5 * (lo + hi);
            f.rate = residual(c) < rbest ? c : best;
        }
        double a = -HUGE_VAL;
        for (std::size_t k = 0; k < m; ++k) a = std::max(a, ly[k] - profile(f.rate, t[k]));
        f.prefactor = std::exp(a);
    }
    f.within_envelope = true;
    f.worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double e = f.envelope(t[k]);
        double ratio = e > 0 ? y[k] / e : (y[k] > 0 ? HUGE_VAL : 0.0);
        f.worst = std::max(f.worst, ratio);
        if (y[k] > slack * e * (1 + 1e-12)) f.within_envelope = false;
    }
    return f;
}

GronwallResult gronwall_check(const std::vector<double>& t, const std::vector<double>& f,
                              const std::vector<double>& g, const std::vector<double>& h, GronwallDirection dir,
                              double tol) {
    const std::size_t n = t.size();
    if (n < 2 || f.size() != n || g.size() != n || h.size() != n) throw ConfigError("gronwall_check: size mismatch");
    bool up = true, down = true;
    for (std::size_t k = 1; k < n; ++k) {
        up = up && h[k] >= h[k - 1];
        down = down && h[k] <= h[k - 1];
    }
    if (!up && !down) throw ConfigError("gronwall_check: h must be monotone");
    for (std::size_t k = 0; k < n; ++k) {
        if (g[k] < 0) throw ConfigError("gronwall_check: g must be nonnegative");
        if (h[k] < 0) throw ConfigError("gronwall_check: h must be nonnegative");
    }
    GronwallResult r;
    double Igf = 0, Ig = 0;
    auto rel = [](double a, double b) { return (a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            double dt = t[k] - t[k - 1];
            Igf += 0.5 * dt * (g[k] * f[k] + g[k - 1] * f[k - 1]);
            Ig += 0.5 * dt * (g[k] + g[k - 1]);
        }
        if (dir == GronwallDirection::forward) {
            r.worst_hypothesis = std::max(r.worst_hypothesis, rel(f[k], h[k] + Igf));
            r.worst_conclusion = std::max(r.worst_conclusion, rel(f[k], h[k] * std::exp(Ig)));
        } else {
            r.worst_hypothesis = std::max(r.worst_hypothesis, rel(h[k] - Igf, f[k]));
            r.worst_conclusion = std::max(r.worst_conclusion, rel(h[k] * std::exp(-Ig), f[k]));
        }
    }
    r.hypothesis = r.worst_hypothesis <= tol;
    r.conclusion = r.hypothesis && r.worst_conclusion <= tol;
    return r;
}

// ---------------------------------------------------------------- equivalence

namespace {

EquivalenceRow ratios(EquivalenceRow r) {
    r.forward = r.ygradu / (r.div_neg + r.scale);
    r.backward = r.div_neg / (r.ygradu + r.scale);
    return r;
}

}  // namespace

std::vector<EquivalenceRow> equivalence_report(const RunConfig& c) {
    c.validate();
    std::vector<EquivalenceRow> out;
    HolderOptions hopt;
    hopt.seed = c.seed;
    auto measure = [&](const std::string& inst, const std::string& member, const ScalarField& w,
                       const VectorField& Y) {
        VorticityField W(w);
        VectorField wY(w.grid);
        for (std::size_t k = 0; k < w.grid.size(); ++k) wY[k] = w[k] * Y[k];
        EquivalenceRow r;
        r.instance = inst;
        r.member = member;
        r.N = w.grid.n;
        r.ygradu = holder_report(directional_grad_u_grid(W, Y, nullptr), c.alpha, hopt).norm();
        r.div_neg = neg_holder_estimate(wY, c.alpha, nullptr, hopt).value;
        r.scale = std::max(W.l1, W.linf) * holder_report(Y, c.alpha, hopt).norm();
        return ratios(r);
    };
    for (int n : {c.N, 2 * c.N}) {
        Grid2D g = Grid2D::centered(n, c.L);
        {
            RadialProfile pm = RadialProfile::patch(1.0).mollified(6 * g.h);
            ScalarField w = sample<double>(g, [&](Vec2 x) { return pm.g(norm(x)); });
            out.push_back(measure("patch", "tangent", w, sample<Vec2>(g, tangent_member(circle(1)))));
        }
        {
            ScalarField w = sample<double>(g, [](Vec2 x) { return bump(2 * norm(x)); });
            out.push_back(measure("smooth", "smooth", w, sample<Vec2>(g, smooth_member)));
        }
        {
            // stationary shear: closed-form gradient, grid data only for the divergence side
            ShearProfile sp = ShearProfile::rough(-0.5, 0.5, 64, c.seed);
            VectorField wY(g), Yg(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                ShearFields f = shear_fields(sp, g.point(k));
                wY[k] = {f.omega, 0};
                Yg[k] = f.gradu * Vec2{1, 0};
            }
            EquivalenceRow r;
            r.instance = "shear";
            r.member = "e1";
            r.N = n;
            r.ygradu = holder_report(Yg, c.alpha, hopt).norm();
            r.div_neg = neg_holder_estimate(wY, c.alpha, nullptr, hopt).value;
            // omega is not integrable on the plane; its L1 norm over the strip and box stands in
            ScalarField w(g);
            for (std::size_t k = 0; k < g.size(); ++k) w[k] = wY[k].x;
            r.scale = std::max(lp_norm(w, 1), linf(w)) * 1.0;
            out.push_back(ratios(r));
        }
    }
    return out;
}

std::string to_csv(const std::vector<EquivalenceRow>& rows) {
    std::string out = "instance,member,N,ygradu_calpha,div_omegaY_neg,scale,forward,backward\n";
    for (const auto& r : rows)
        out += r.instance + "," + r.member + "," + std::to_string(r.N) + "," +
               csv_line({r.ygradu, r.div_neg, r.scale, r.forward, r.backward}) + "\n";
    return out;
}

LemmaFuzzReport lemma_fuzz(int dim, std::uint64_t trials, std::uint64_t seed) {
    LemmaFuzzReport r;
    r.fuzz = serfati_fuzz(dim, trials, seed);
    r.min_slack = 1 - r.fuzz.worst_ratio;
    if (r.fuzz.violations) {
        std::ostringstream os;
        os << "lemma fuzz: " << r.fuzz.violations << " violations in dimension " << dim;
        throw PropertyViolation(os.str());
    }
    return r;
}

}  // namespace striate
