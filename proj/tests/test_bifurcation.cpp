#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "sleppulse/bifurcation.hpp"

using namespace sleppulse;

namespace {

constexpr double kPi = std::numbers::pi;

const SlepContext& ref_ctx() {
  static const SlepContext ctx = SlepContext::make(oracle::reference_params());
  return ctx;
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd A(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(i, 0) = std::log(x[i]);
    A(i, 1) = 1.0;
    b(i) = std::log(y[i]);
  }
  return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

TEST_CASE("drift line") {
  const auto& ctx = ref_ctx();
  const auto dl = drift_line(ctx);
  CHECK(dl.C1 > 0.0);
  CHECK(dl.C2 > 0.0);
  CHECK(dl.C1 == doctest::Approx(0.13767629928564018).epsilon(1e-12));
  CHECK(dl.C2 == doctest::Approx(0.042021895570845784).epsilon(1e-12));

  SUBCASE("slope of the odd function at zero") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> rate(0.1, 30.0);
    for (int i = 0; i < 20; ++i) {
      const double th = rate(rng), tt = rate(rng);
      const double h = 1e-5;
      const double fd = (G_od(h, th, tt, ctx) - G_od(-h, th, tt, ctx)) / (2 * h);
      const double line = 1.0 - dl.C1 * th - dl.C2 * tt;
      CHECK(std::abs(fd - line) < 1e-6 * std::max(1.0, std::abs(line)));
    }
  }
  SUBCASE("linear in the coupling coefficients at fixed layer position") {
    const auto& p = ctx.params;
    const double e = std::exp(-2 * ctx.x_star), ed = std::exp(-2 * ctx.x_star / p.D);
    for (double k : {0.5, 2.0, 3.0}) {
      auto qa = p;
      qa.alpha *= k;
      qa.gamma += (k - 1) * p.alpha * e;
      const auto ca = SlepContext::make(qa);
      CHECK(std::abs(ca.x_star - ctx.x_star) < 1e-13);
      const auto la = drift_line(ca);
      CHECK(la.C1 == doctest::Approx(k * dl.C1).epsilon(1e-12));
      CHECK(la.C2 == doctest::Approx(dl.C2).epsilon(1e-12));
      auto qb = p;
      qb.beta *= k;
      qb.gamma += (k - 1) * p.beta * ed;
      const auto lb = drift_line(SlepContext::make(qb));
      CHECK(lb.C2 == doctest::Approx(k * dl.C2).epsilon(1e-12));
      CHECK(lb.C1 == doctest::Approx(dl.C1).epsilon(1e-12));
    }
  }
  SUBCASE("nonzero real odd root changes sign across the line") {
    for (double psi : {0.2, 0.7, 1.2}) {
      const double s_line = 1.0 / (dl.C1 * std::cos(psi) + dl.C2 * std::sin(psi));
      for (double f : {0.5, 0.9, 1.1, 1.6}) {
        const double th = f * s_line * std::cos(psi), tt = f * s_line * std::sin(psi);
        const auto root = drift_eigenvalue(th, tt, ctx, 0.01);
        // far below the line the root can sit beyond the branch edge
        if (f < 0.9 && !root) continue;
        REQUIRE(root.has_value());
        CHECK(std::abs(G_od(*root, th, tt, ctx)) < 1e-10);
        if (f > 1) CHECK(*root > 0.0);
        else CHECK(*root < 0.0);
        // slope at zero has the opposite sign to the excess
        CHECK((slep_eval(Parity::odd, 0.0, th, tt, ctx).d_lambda > 0) == (dl.excess(th, tt) < 0));
      }
    }
  }
}

TEST_CASE("Hopf points") {
  const auto& ctx = ref_ctx();
  const auto hp = hopf_point(kPi / 4, ctx);
  CHECK(hp.xi_star > 0.0);
  CHECK(hp.residual < 1e-10);
  CHECK(std::abs(G_ev(cplx(0.0, hp.xi_star), hp.tau_hat, hp.theta_hat, ctx)) < 1e-10);
  CHECK(hp.s_star == doctest::Approx(4.10044).epsilon(1e-5));
  CHECK(hp.eta_star == doctest::Approx(hp.s_star * hp.xi_star).epsilon(1e-14));
  CHECK(hp.tau_hat == doctest::Approx(hp.s_star * std::cos(kPi / 4)).epsilon(1e-14));
  CHECK(hp.transversality > 0.0);
  CHECK(hp.transversality == doctest::Approx(hp.transversality_analytic).epsilon(1e-5));

  SUBCASE("same crossing from any initial bracket") {
    for (double hi : {1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e3, 1e5}) {
      CHECK(std::abs(hopf_point(kPi / 4, ctx, hi).eta_star - hp.eta_star) < 1e-10);
    }
  }
  SUBCASE("the bisection function is decreasing and starts above zeta0") {
    for (double psi : {0.1, 0.7, 1.4}) {
      CHECK(hopf_real_part(0.0, psi, ctx) > ctx.zeta0);
      double prev = hopf_real_part(0.0, psi, ctx);
      for (int k = 1; k < 200; ++k) {
        const double r = hopf_real_part(0.05 * k, psi, ctx);
        CHECK(r < prev);
        prev = r;
      }
    }
  }
  SUBCASE("three reference angles") {
    const double expect[] = {5.965, 4.100, 5.041};
    int i = 0;
    for (double psi : {kPi / 8, kPi / 4, 3 * kPi / 8}) {
      const auto h = hopf_point(psi, ctx);
      CHECK(h.residual < 1e-10);
      CHECK(h.transversality > 0.0);
      CHECK(h.s_star == doctest::Approx(expect[i++]).epsilon(1e-3));
    }
  }
}

TEST_CASE("Hopf curve") {
  const auto& ctx = ref_ctx();
  const auto grid = default_psi_grid();
  CHECK(grid.size() == 181);
  CHECK(grid.front() == doctest::Approx(0.01));
  CHECK(grid.back() == doctest::Approx(kPi / 2 - 0.01));
  const auto curve = hopf_curve(grid, ctx, 2);
  CHECK(curve.failures.empty());
  REQUIRE(curve.points.size() == grid.size());
  const auto dl = drift_line(ctx);
  int crossings = 0;
  double max_jump = 0;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& h = curve.points[i];
    CHECK(h.psi == grid[i]);
    CHECK(h.xi_star > 0.0);
    CHECK(std::isfinite(h.s_star));
    CHECK(h.s_star > 0.0);
    CHECK(h.tau_hat > 0.0);
    CHECK(h.theta_hat > 0.0);
    if (i > 0) {
      const auto& g = curve.points[i - 1];
      max_jump = std::max(max_jump, std::hypot(h.tau_hat - g.tau_hat, h.theta_hat - g.theta_hat) / (h.psi - g.psi));
      if ((dl.excess(h.tau_hat, h.theta_hat) > 0) != (dl.excess(g.tau_hat, g.theta_hat) > 0)) ++crossings;
    }
  }
  CHECK(crossings == 2);
  // Lipschitz bound: the curve never jumps on refinement
  const auto fine = hopf_curve({0.7, 0.7 + 1e-4}, ctx);
  const double local = std::hypot(fine.points[1].tau_hat - fine.points[0].tau_hat,
                                  fine.points[1].theta_hat - fine.points[0].theta_hat) / 1e-4;
  CHECK(local < 2 * max_jump);
}

TEST_CASE("real-eigenvalue landmarks") {
  const auto& ctx = ref_ctx();
  const double psi = kPi / 4;
  const auto lm = real_eig_landmarks(psi, ctx);
  CHECK(lm.s_c == doctest::Approx(0.348076).epsilon(1e-5));
  CHECK(lm.s_under == doctest::Approx(0.0834541).epsilon(1e-5));
  CHECK(lm.s_over == doctest::Approx(56.8090).epsilon(1e-5));
  CHECK(lm.lambda_under == doctest::Approx(-10.2998).epsilon(1e-4));
  CHECK(lm.lambda_over == doctest::Approx(0.56996).epsilon(1e-4));
  CHECK(lm.s_under < lm.s_c);
  CHECK(lm.s_c < lm.s_over);

  SUBCASE("closed form of the critical radius") {
    const auto& p = ctx.params;
    const double xs = ctx.x_star;
    const double denom = p.alpha * g_plus_d1(2 * xs) * std::cos(psi) + p.beta / (p.D * p.D * p.D) * g_plus_d1(2 * xs / p.D) * std::sin(psi);
    CHECK(lm.s_c == doctest::Approx(-1.0 / (4 * ctx.kappa_sq * xs * xs * denom)).epsilon(1e-12));
  }
  SUBCASE("sign of the minimiser") {
    for (double f : {0.1, 0.5, 0.9, 1.1, 2.0, 10.0}) {
      const double l = lambda_min(f * lm.s_c, psi, ctx);
      if (f < 1) CHECK(l < 0.0);
      else CHECK(l > 0.0);
      CHECK(std::abs(ray_eval(l, f * lm.s_c, psi, ctx).d_lambda) < 1e-9);
    }
    CHECK(std::abs(lambda_min(lm.s_c, psi, ctx)) < 1e-9);
  }
  SUBCASE("minimum value vanishes at the landmarks") {
    CHECK(std::abs(min_value(lm.s_under, psi, ctx)) < 1e-9);
    CHECK(std::abs(min_value(lm.s_over, psi, ctx)) < 1e-9);
    CHECK(min_value(lm.s_c, psi, ctx) > 0.0);
    CHECK(min_value(0.5 * lm.s_under, psi, ctx) < 0.0);
    CHECK(min_value(2.0 * lm.s_over, psi, ctx) < 0.0);
  }
  SUBCASE("large-radius behaviour") {
    std::vector<double> s, lam, dev;
    for (double e = 3.0; e <= 5.0 + 1e-9; e += 0.25) {
      s.push_back(std::pow(10.0, e));
      lam.push_back(lambda_min(s.back(), psi, ctx));
    }
    CHECK(loglog_slope(s, lam) == doctest::Approx(-1.0 / 3.0).epsilon(0.06));
    // the limit of the minimum value is reached only algebraically
    std::vector<double> big;
    for (double e = 6.0; e <= 12.0 + 1e-9; e += 1.0) {
      big.push_back(std::pow(10.0, e));
      dev.push_back(min_value(big.back(), psi, ctx) / -ctx.zeta0 - 1.0);
      CHECK(dev.back() < 0.0);
    }
    for (auto& d : dev) d = -d;
    CHECK(loglog_slope(big, dev) == doctest::Approx(-1.0 / 3.0).epsilon(0.06));
    CHECK(dev.back() < 1e-3);
    CHECK(dev.front() > 1e-3);
  }
  SUBCASE("small-radius behaviour") {
    std::vector<double> s, lam;
    for (double e = -7.0; e <= -5.0 + 1e-9; e += 0.25) {
      s.push_back(std::pow(10.0, e));
      lam.push_back(-lambda_min(s.back(), psi, ctx));
    }
    CHECK(loglog_slope(s, lam) == doctest::Approx(-1.0).epsilon(0.05));
  }
}

TEST_CASE("eigenvalue path along the diagonal ray") {
  const auto& ctx = ref_ctx();
  const double psi = kPi / 4;
  const auto lm = real_eig_landmarks(psi, ctx);
  const auto path = trace_eigen_path(psi, 0.5 * lm.s_under, 1.5 * lm.s_over, ctx);
  CHECK(path.s_under == doctest::Approx(lm.s_under).epsilon(1e-12));
  CHECK(path.s_over == doctest::Approx(lm.s_over).epsilon(1e-12));
  CHECK(0.0 < path.s_under);
  CHECK(path.s_under < path.s_star);
  CHECK(path.s_star < path.s_over);
  CHECK(path.c_minus < 0.0);
  CHECK(path.c_plus > 0.0);
  CHECK(path.c_minus == doctest::Approx(-1081.3).epsilon(1e-3));
  CHECK(path.c_plus == doctest::Approx(0.007136).epsilon(1e-3));

  SUBCASE("sample structure") {
    REQUIRE(path.samples.size() > 100);
    double prev = 0;
    int complex_n = 0;
    for (const auto& smp : path.samples) {
      CHECK(smp.s >= prev);
      prev = smp.s;
      if (smp.kind == PathKind::complex_pair) {
        ++complex_n;
        CHECK(smp.s > path.s_under);
        CHECK(smp.s < path.s_over);
        CHECK(smp.lambda.imag() != 0.0);
        CHECK(std::abs(smp.lambda - std::conj(smp.partner)) < 1e-12 * std::abs(smp.lambda));
        CHECK(std::abs(G_ev(smp.lambda, smp.s * std::cos(psi), smp.s * std::sin(psi), ctx)) < 1e-8 * std::max(1.0, std::abs(smp.lambda)));
      } else if (smp.kind == PathKind::real_pair) {
        CHECK(smp.lambda.imag() == 0.0);
        CHECK(smp.partner.imag() == 0.0);
        CHECK((smp.s <= path.s_under || smp.s >= path.s_over));
      }
    }
    CHECK(complex_n > 50);
    CHECK(path.samples.front().kind == PathKind::real_pair);
    CHECK(path.samples.back().kind == PathKind::real_pair);
  }
  SUBCASE("root counts on either side") {
    const auto low = real_roots(0.5 * path.s_under, psi, ctx);
    REQUIRE(low.has_value());
    CHECK(low->first < low->second);
    CHECK(low->second < 0.0);
    CHECK(!real_roots(0.5 * (path.s_under + path.s_over), psi, ctx).has_value());
    const auto high = real_roots(1.5 * path.s_over, psi, ctx);
    REQUIRE(high.has_value());
    CHECK(high->first > 0.0);
  }
  SUBCASE("crossing of the imaginary axis") {
    const auto hp = hopf_point(psi, ctx);
    CHECK(path.s_star == doctest::Approx(hp.s_star).epsilon(1e-12));
    const auto at = complex_root(hp.s_star, psi, cplx(0.0, hp.xi_star * 1.01), ctx);
    REQUIRE(at.has_value());
    CHECK(std::abs(at->real()) < 1e-8);
    CHECK(std::abs(*at - cplx(0.0, hp.xi_star)) < 1e-6);
  }
  SUBCASE("square-root splitting near both double roots") {
    std::vector<double> d, gap_lo, gap_hi, im_lo;
    for (double e = -5.0; e <= -2.0 + 1e-9; e += 0.5) {
      const double del = std::pow(10.0, e);
      d.push_back(del);
      const auto a = real_roots(lm.s_under * (1 - del), psi, ctx);
      const auto b = real_roots(lm.s_over * (1 + del), psi, ctx);
      REQUIRE(a.has_value());
      REQUIRE(b.has_value());
      gap_lo.push_back(a->second - a->first);
      gap_hi.push_back(b->second - b->first);
    }
    CHECK(loglog_slope(d, gap_lo) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(loglog_slope(d, gap_hi) == doctest::Approx(0.5).epsilon(0.1));
    // complex side: |Im| / sqrt(s - s_under) tends to sqrt|c_minus|
    for (double e = -6.0; e <= -4.0 + 1e-9; e += 0.5) {
      const double ds = std::pow(10.0, e) * lm.s_under;
      const cplx guess(lm.lambda_under, std::sqrt(-path.c_minus * ds));
      const auto r = complex_root(lm.s_under + ds, psi, guess, ctx);
      REQUIRE(r.has_value());
      CHECK(std::abs(r->imag()) / std::sqrt(ds) == doctest::Approx(std::sqrt(-path.c_minus)).epsilon(0.05));
    }
    for (double e = -6.0; e <= -4.0 + 1e-9; e += 0.5) {
      const double ds = std::pow(10.0, e) * lm.s_over;
      const cplx guess(lm.lambda_over, std::sqrt(path.c_plus * ds));
      const auto r = complex_root(lm.s_over - ds, psi, guess, ctx);
      REQUIRE(r.has_value());
      CHECK(std::abs(r->imag()) / std::sqrt(ds) == doctest::Approx(std::sqrt(path.c_plus)).epsilon(0.05));
    }
  }
  SUBCASE("no complex roots outside the window") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> re(-2 * ctx.zeta0, 2 * ctx.zeta0), im(0.01, 2 * ctx.zeta0);
    for (double s : {0.9 * lm.s_under, 0.5 * lm.s_under, 1.1 * lm.s_over, 3.0 * lm.s_over}) {
      for (int i = 0; i < 50; ++i) {
        const cplx seed(re(rng), im(rng));
        const double edge = ray_domain_edge(s, psi);
        if (seed.real() <= edge) continue;
        std::optional<cplx> r;
        try {
          r = complex_root(s, psi, seed, ctx);
        } catch (const Error&) {
          continue;
        }
        if (r) CHECK(std::abs(r->imag()) < 1e-8 * std::max(1.0, std::abs(*r)));
      }
    }
  }
}

TEST_CASE("landmark ordering over the quadrant") {
  const auto& ctx = ref_ctx();
  for (int k = 0; k <= 12; ++k) {
    const double psi = 0.05 + (kPi / 2 - 0.1) * k / 12.0;
    const auto lm = real_eig_landmarks(psi, ctx);
    const auto hp = hopf_point(psi, ctx);
    CHECK(lm.s_under < hp.s_star);
    CHECK(hp.s_star < lm.s_over);
    CHECK(lm.s_under < lm.s_c);
  }
}

TEST_CASE("codimension-two points") {
  const auto& ctx = ref_ctx();
  const auto pts = codim2_points(ctx);
  REQUIRE(pts.size() == 2);
  const auto dl = drift_line(ctx);
  CHECK(pts[0].psi == doctest::Approx(0.32597).epsilon(1e-4));
  CHECK(pts[1].psi == doctest::Approx(1.49158).epsilon(1e-4));
  CHECK(pts[0].tau_hat == doctest::Approx(6.584106).epsilon(1e-5));
  CHECK(pts[0].theta_hat == doctest::Approx(2.225618).epsilon(1e-5));
  CHECK(pts[1].tau_hat == doctest::Approx(1.499180).epsilon(1e-5));
  CHECK(pts[1].theta_hat == doctest::Approx(18.885356).epsilon(1e-5));
  for (const auto& c : pts) {
    CHECK(std::abs(dl.excess(c.tau_hat, c.theta_hat)) < 1e-8);
    CHECK(std::abs(G_ev(cplx(0.0, c.xi_star), c.tau_hat, c.theta_hat, ctx)) < 1e-8);
    CHECK(c.line_residual < 1e-8);
    CHECK(c.slep_residual < 1e-8);
  }
  auto p = ctx.params;
  p.alpha = 1.05;
  CHECK(codim2_points(SlepContext::make(p)).size() == 2);
}

TEST_CASE("region labels") {
  const auto& ctx = ref_ctx();
  CHECK(classify_region(3.0, 2.0, ctx) == Region::stable);
  CHECK(classify_region(13.0, 0.5, ctx) == Region::drift);
  CHECK(classify_region(5.0, 4.0, ctx) == Region::hopf);
  CHECK(classify_region(8.2, 3.7, ctx) == Region::drift_hopf);
  const auto dl = drift_line(ctx);
  const double th = 2.0;
  const double on = (1.0 - dl.C2 * th) / dl.C1;
  CHECK(classify_region(on, th, ctx) == Region::drift);
  CHECK(classify_region(on * (1 - 1e-6), th, ctx) == Region::stable);
  CHECK(std::string(to_string(Region::drift_hopf)) == "drift+hopf");

  SUBCASE("sign of the odd slope flips across the line along rays") {
    for (double psi : {0.1, 0.5, 1.0, 1.5}) {
      const double s_line = 1.0 / (dl.C1 * std::cos(psi) + dl.C2 * std::sin(psi));
      for (double f : {0.99, 1.01}) {
        const double a = f * s_line * std::cos(psi), b = f * s_line * std::sin(psi);
        const double slope = slep_eval(Parity::odd, 0.0, a, b, ctx).d_lambda;
        CHECK((slope < 0) == (f > 1));
      }
    }
  }
}
