#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "striate/experiments.hpp"
#include "striate/holder_norms.hpp"

using namespace striate;

namespace {

double drift(const std::vector<DiagnosticsRow>& rows, double DiagnosticsRow::*col) {
    double d = 0, v0 = rows.front().*col;
    for (const auto& r : rows) d = std::max(d, std::abs(r.*col - v0));
    return v0 != 0 ? d / std::abs(v0) : d;
}

RunConfig small(const std::string& extra = "") {
    return parse_config("N = 64\nT = 0.2\ndt = 0.02\ncadence = 10\n" + extra);
}

}  // namespace

TEST_CASE("config parsing") {
    RunConfig c = parse_config(R"(
# comment
[grid]
N = 256
L = 2
[oracles]
profile = ring(0.5, 1)   # trailing comment
[striated_algebra]
family = tangent, band(0.2), core(0.7)
[flow_transport]
dt = 0.005
[experiments_cli]
T = 0.5
alpha = 0.25
seed = 9
)");
    CHECK(c.N == 256);
    CHECK(c.L == 2);
    CHECK(c.profile == "ring(0.5, 1)");
    REQUIRE(c.family.size() == 3);
    CHECK(c.family[1] == "band(0.2)");
    CHECK(c.alpha == 0.25);
    CHECK(c.seed == 9);
    CHECK(c.eps_value() == doctest::Approx(6 * 4.0 / 256));

    RunConfig back = parse_config(to_text(c));
    CHECK(back.N == c.N);
    CHECK(back.dt == c.dt);
    CHECK(back.family == c.family);
    CHECK(back.eps_value() == c.eps_value());

    for (const char* bad : {"N = 100", "N = 2048", "N = 32", "alpha = 1", "alpha = 0", "dt = 0.03", "L = -1",
                            "bogus = 1", "N = 64\nN = 128", "N = abc", "N = 64.5", "profile = blob(1)",
                            "profile = patch()", "eps = 0.001", "cadence = 0",
                            "no equals sign"}) {
        INFO(std::string(bad));
        CHECK_THROWS_AS(parse_config(bad), ConfigError);
    }
    // family members are checked when the data are built
    CHECK_THROWS_AS(initial_data(parse_config("family = tangent, wave")), ConfigError);
    // the shear oracle is not L1 and never runs through the flow
    CHECK_THROWS_AS(initial_data(parse_config("profile = shear(table.txt)")), ConfigError);
    CHECK_THROWS_AS(initial_data(parse_config("profile = patch(1.6)")), ConfigError);
}

TEST_CASE("family constructors") {
    InitialData d = initial_data(parse_config("N = 128\nfamily = tangent, band, core, smooth, e1"));
    REQUIRE(d.family.size() == 5);
    // tangent and band agree with the oracle family where the band cutoff is flat
    for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.7, 0.6}, Vec2{1.0, 0.05}}) {
        Vec2 a = d.family[0](x), b = patch_family_Y0(x);
        CHECK(norm(a - b) <= 1e-14);
    }
    CHECK(norm(d.family[1]({1.05, 0.0})) <= 1e-14);         // band vanishes on the boundary layer
    CHECK(norm(d.family[1]({0.1, 0.2}) - Vec2{1, 0}) <= 1e-14);
    CHECK(norm(d.family[2]({0.1, 0.2}) - Vec2{1, 0}) <= 1e-14);  // core is e1 near the centre
    CHECK(norm(d.family[2]({0.85, 0.0})) == 0);
    // every member built from a stream function is divergence-free
    for (int m : {0, 1, 2}) {
        const double s = 1e-5;
        for (Vec2 x : {Vec2{0.2, 0.3}, Vec2{0.55, -0.2}, Vec2{1.2, 0.4}, Vec2{-0.3, -0.65}}) {
            Vec2 px = d.family[m](x + Vec2{s, 0}), mx = d.family[m](x - Vec2{s, 0});
            Vec2 py = d.family[m](x + Vec2{0, s}), my = d.family[m](x - Vec2{0, s});
            double div = (px.x - mx.x + py.y - my.y) / (2 * s);
            CHECK(std::abs(div) <= 1e-6);
        }
    }
    // tangency to the perturbed boundary
    InitialData p = initial_data(parse_config("N = 128\nprofile = perturbed(0.1, 3)\nfamily = tangent, band"));
    REQUIRE(p.curve0.size() == 256);
    for (std::size_t k = 0; k < p.curve0.size(); k += 17) {
        Vec2 a = p.curve0[k], b = p.curve0[(k + 1) % p.curve0.size()];
        Vec2 t = (b - a) / norm(b - a), Y = p.family[0]((a + b) / 2.0);
        CHECK(std::abs(t.x * Y.y - t.y * Y.x) <= 2e-3 * norm(Y));
        CHECK(norm(p.family[1](a)) <= 1e-12);
    }
}

TEST_CASE("diagnostics header and NaN guard") {
    DiagnosticsRow r;
    CHECK(DiagnosticsRow::header().size() == r.values().size());
    for (std::size_t k = 1; k < DiagnosticsRow::header().size(); ++k) CHECK(DiagnosticsRow::header()[k].find('[') != std::string::npos);
    CHECK_NOTHROW(check_row(r));
    r.IY = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(check_row(r), NumericalAbort);
    r.IY = 1;
    r.V = HUGE_VAL;
    CHECK_THROWS_AS(check_row(r), NumericalAbort);
    CHECK(csv_line({0.1, 1.0 / 3}) == "0.10000000000000001,0.33333333333333331");
}

TEST_CASE("zero vorticity leaves the family in place") {
    auto res = run(small("profile = zero"));
    REQUIRE(res.rows.size() == 3);
    for (const auto& r : res.rows) {
        CHECK(r.gradu_linf == 0);
        CHECK(r.u_linf == 0);
        CHECK(r.Ygradu_calpha == 0);
        CHECK(r.omega_l1 == 0);
        CHECK(r.Y_calpha == doctest::Approx(res.rows[0].Y_calpha).epsilon(1e-12));
        CHECK(r.IY == doctest::Approx(res.rows[0].IY).epsilon(1e-12));
        CHECK(r.grad_eta == doctest::Approx(1).epsilon(1e-12));
    }
}

TEST_CASE("CFL violation is a config error") {
    CHECK_THROWS_AS(run(parse_config("N = 64\nT = 0.2\ndt = 0.1")), ConfigError);
}

TEST_CASE("identical configs give identical CSV") {
    RunConfig c = small("profile = perturbed(0.1, 3)\nfamily = tangent, band");
    CHECK(to_csv(run(c).rows) == to_csv(run(c).rows));
}

TEST_CASE("stationary patch") {
    RunConfig c = parse_config("N = 128\nT = 1\ndt = 0.01\ncadence = 4");
    auto res = run(c);
    const auto& rows = res.rows;
    REQUIRE(rows.size() == 5);
    for (auto col : {&DiagnosticsRow::gradu_linf, &DiagnosticsRow::u_linf, &DiagnosticsRow::V,
                     &DiagnosticsRow::V_current, &DiagnosticsRow::Y_calpha, &DiagnosticsRow::Ygradu_calpha,
                     &DiagnosticsRow::IY, &DiagnosticsRow::boundary_c1alpha})
        CHECK(drift(rows, col) <= 0.05);
    for (auto col : {&DiagnosticsRow::omega_l1, &DiagnosticsRow::omega_l2, &DiagnosticsRow::omega_linf})
        CHECK(drift(rows, col) <= 1e-3);
    for (const auto& r : rows) {
        CHECK(r.IY >= 0.9 * res.I0);
        CHECK(r.volume_drift <= 1e-3);
        // V with the initial and the current sup norm coincide up to interpolation
        CHECK(std::abs(r.V - r.V_current) <= 1e-6);
    }
    // |K| <= 1/(2 pi |x|): among |omega| <= M with mass m the worst case is a disc, giving sqrt(m M / pi)
    auto ubound = [](const DiagnosticsRow& r) { return std::sqrt(r.omega_l1 * r.omega_linf / M_PI); };
    for (const auto& r : rows) CHECK(r.u_linf <= ubound(r));
    auto bump = run(parse_config("N = 64\nT = 1\ndt = 0.02\ncadence = 5\nprofile = bump(1)"));
    for (const auto& r : bump.rows) {
        CHECK(r.u_linf <= ubound(r));
        for (auto col : {&DiagnosticsRow::omega_l1, &DiagnosticsRow::omega_l2, &DiagnosticsRow::omega_linf})
            CHECK(drift(bump.rows, col) <= 1e-3);
    }
}

TEST_CASE("finite-difference residual columns shrink under refinement") {
    // div Y and div(omega Y) vanish for the tangent/core family on the patch
    auto a = run(parse_config("N = 64\nT = 0.1\ndt = 0.02\ncadence = 10")).rows.back();
    auto b = run(parse_config("N = 128\nT = 0.1\ndt = 0.02\ncadence = 10")).rows.back();
    CHECK(b.divY_calpha < a.divY_calpha);
    CHECK(b.div_omegaY_neg < a.div_omegaY_neg);
}

TEST_CASE("envelope fit") {
    std::vector<double> t, c, e;
    for (int k = 0; k <= 40; ++k) {
        t.push_back(0.05 * k);
        c.push_back(3.0);
        e.push_back(std::exp(0.05 * k));
    }
    for (auto sh : {EnvelopeShape::exp, EnvelopeShape::double_exp}) {
        auto f = envelope_fit(t, c, sh);
        CHECK(f.rate <= 1e-6);
        CHECK(f.prefactor == doctest::Approx(3));
        CHECK(f.within_envelope);
    }
    auto f = envelope_fit(t, e, EnvelopeShape::exp);
    CHECK(f.rate == doctest::Approx(1).epsilon(0.05));
    CHECK(f.within_envelope);
    CHECK(f.worst == doctest::Approx(1).epsilon(1e-9));

    std::vector<double> dd;
    for (double s : t) dd.push_back(2 * std::exp(0.7 * std::exp(0.7 * s)));
    auto g = envelope_fit(t, dd, EnvelopeShape::double_exp);
    CHECK(g.rate == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(g.within_envelope);

    // a late blow-up leaves the envelope
    std::vector<double> late = e;
    late.back() *= 100;
    CHECK_FALSE(envelope_fit(t, late, EnvelopeShape::exp).within_envelope);

    std::vector<double> dec;
    for (double s : t) dec.push_back(std::exp(-s));
    CHECK_THROWS_AS(envelope_fit(t, dec, EnvelopeShape::exp), ConfigError);
    CHECK_THROWS_AS(envelope_fit({0, 1, 2}, {1, 1, 1}, EnvelopeShape::exp), ConfigError);
}

TEST_CASE("gronwall check") {
    std::vector<double> t, one, zero, two, up, down, fast;
    for (int k = 0; k <= 1000; ++k) {
        double s = 1e-3 * k;
        t.push_back(s);
        one.push_back(1);
        zero.push_back(0);
        two.push_back(2);
        up.push_back(std::exp(2 * s));
        down.push_back(std::exp(-2 * s));
        fast.push_back(std::exp(3 * s));
    }
    auto a = gronwall_check(t, one, zero, one, GronwallDirection::forward);
    CHECK(a.hypothesis);
    CHECK(a.conclusion);
    CHECK(a.worst_conclusion == 0);
    auto b = gronwall_check(t, up, two, one, GronwallDirection::forward);
    CHECK(b.hypothesis);
    CHECK(b.conclusion);
    CHECK(std::abs(b.worst_conclusion) <= 1e-4);
    auto c = gronwall_check(t, down, two, one, GronwallDirection::reverse);
    CHECK(c.hypothesis);
    CHECK(c.conclusion);
    auto d = gronwall_check(t, fast, two, one, GronwallDirection::forward);
    CHECK_FALSE(d.hypothesis);
    CHECK_FALSE(d.conclusion);
    std::vector<double> wiggle = one;
    wiggle[500] = 2;
    CHECK_THROWS_AS(gronwall_check(t, one, zero, wiggle, GronwallDirection::forward), ConfigError);
    std::vector<double> neg = zero;
    neg[3] = -1;
    CHECK_THROWS_AS(gronwall_check(t, one, neg, one, GronwallDirection::forward), ConfigError);
}

TEST_CASE("lemma fuzz wrapper") {
    auto r2 = lemma_fuzz(2, 200000, 5);
    CHECK(r2.fuzz.violations == 0);
    CHECK(r2.min_slack >= 0);
    auto r3 = lemma_fuzz(3, 20000, 5);
    CHECK(r3.fuzz.violations == 0);
    CHECK(r3.fuzz.degenerate < r3.fuzz.trials / 100);
    CHECK_THROWS_AS(lemma_fuzz(4, 10, 1), ConfigError);
}

TEST_CASE("equivalence report") {
    auto rows = equivalence_report(parse_config("N = 64"));
    REQUIRE(rows.size() == 6);
    auto find = [&](const std::string& inst, int n) {
        for (const auto& r : rows)
            if (r.instance == inst && r.N == n) return r;
        FAIL("missing row");
        return rows[0];
    };
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.ygradu));
        CHECK(r.forward <= 10);
        CHECK(r.backward <= 10);
    }
    for (int n : {64, 128}) {
        auto p = find("patch", n);
        CHECK(p.div_neg <= 1e-2 * p.ygradu);
        auto s = find("shear", n);
        CHECK(s.ygradu == 0);
        CHECK(s.div_neg <= 1e-14);
    }
    CHECK(std::abs(find("patch", 128).ygradu / find("patch", 64).ygradu - 1) <= 0.25);
    double r64 = find("smooth", 64).forward, r128 = find("smooth", 128).forward;
    CHECK(std::max(r64, r128) / std::min(r64, r128) <= 10);
}
