#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "sleppulse/spectrum.hpp"

namespace sleppulse {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

// Unknowns are interleaved per cell: (u_i, v_i, w_i) at 3i, 3i+1, 3i+2.
void laplacian_rows(std::vector<Trip>& t, int n, int comp, double coef, double dx, Parity left) {
  const double k = coef / (dx * dx);
  for (int i = 0; i < n; ++i) {
    const int r = 3 * i + comp;
    double d = -2.0 * k;
    if (i == 0) d += left == Parity::even ? k : -k;
    else t.emplace_back(r, r - 3, k);
    if (i == n - 1) d += k;
    else t.emplace_back(r, r + 3, k);
    t.emplace_back(r, r, d);
  }
}

SpMat jacobian(const Eigen::VectorXd& u, const ModelParams& p, double dx, Parity par) {
  const int n = static_cast<int>(u.size());
  std::vector<Trip> t;
  t.reserve(15 * n);
  laplacian_rows(t, n, 0, p.epsilon * p.epsilon, dx, par);
  laplacian_rows(t, n, 1, 1.0, dx, par);
  laplacian_rows(t, n, 2, p.D * p.D, dx, par);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(3 * i, 3 * i, reaction_prime(u(i)));
    t.emplace_back(3 * i, 3 * i + 1, -p.epsilon * p.alpha);
    t.emplace_back(3 * i, 3 * i + 2, -p.epsilon * p.beta);
    t.emplace_back(3 * i + 1, 3 * i, 1.0);
    t.emplace_back(3 * i + 1, 3 * i + 1, -1.0);
    t.emplace_back(3 * i + 2, 3 * i, 1.0);
    t.emplace_back(3 * i + 2, 3 * i + 2, -1.0);
  }
  SpMat J(3 * n, 3 * n);
  J.setFromTriplets(t.begin(), t.end());
  return J;
}

// Second difference with an even reflection at 0 and Neumann at L.
Eigen::VectorXd lap_even(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = i == 0 ? f(0) : f(i - 1);
    const double r = i == n - 1 ? f(n - 1) : f(i + 1);
    out(i) = (l - 2.0 * f(i) + r) / (dx * dx);
  }
  return out;
}

Eigen::VectorXd steady_residual(const Eigen::VectorXd& z, const ModelParams& p, double dx) {
  const Eigen::Index n = z.size() / 3;
  Eigen::VectorXd u(n), v(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i) = z(3 * i);
    v(i) = z(3 * i + 1);
    w(i) = z(3 * i + 2);
  }
  const Eigen::VectorXd lu = lap_even(u, dx), lv = lap_even(v, dx), lw = lap_even(w, dx);
  Eigen::VectorXd F(z.size());
  const double e = p.epsilon;
  for (Eigen::Index i = 0; i < n; ++i) {
    F(3 * i) = e * e * lu(i) + reaction(u(i)) - e * (p.alpha * v(i) + p.beta * w(i) + p.gamma);
    F(3 * i + 1) = lv(i) + u(i) - v(i);
    F(3 * i + 2) = p.D * p.D * lw(i) + u(i) - w(i);
  }
  return F;
}

// (coef Lap - 1) y = -u with the even closure
Eigen::VectorXd inhibitor_solve(const Eigen::VectorXd& u, double coef, double dx) {
  const Eigen::Index n = u.size();
  const double k = coef / (dx * dx);
  std::vector<Trip> t;
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = -2.0 * k - 1.0;
    if (i == 0) d += k;
    else t.emplace_back(i, i - 1, k);
    if (i == n - 1) d += k;
    else t.emplace_back(i, i + 1, k);
    t.emplace_back(i, i, d);
  }
  SpMat A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<SpMat> lu(A);
  return lu.solve(Eigen::VectorXd(-u));
}

}  // namespace

DiscreteSteadyState discrete_steady_state(const PulseSolution& pulse, int n_grid, double L) {
  const auto& p = pulse.params();
  if (n_grid < 8 || !(L > 2.0 * pulse.layer().x_star)) {
    throw Error(Errc::domain_error, "discrete steady state: need n_grid >= 8 and L > 2 x*");
  }
  DiscreteSteadyState st;
  st.dx = L / n_grid;
  if (st.dx > p.epsilon / 4.0) {
    std::ostringstream os;
    os << "grid spacing " << st.dx << " exceeds eps/4 = " << p.epsilon / 4.0;
    throw Error(Errc::resolution_error, os.str());
  }
  st.x = Eigen::VectorXd::LinSpaced(n_grid, 0.5 * st.dx, L - 0.5 * st.dx);
  Eigen::VectorXd u = pulse.u(st.x);
  const Eigen::VectorXd v = inhibitor_solve(u, 1.0, st.dx);
  const Eigen::VectorXd w = inhibitor_solve(u, p.D * p.D, st.dx);
  Eigen::VectorXd z(3 * n_grid);
  for (int i = 0; i < n_grid; ++i) {
    z(3 * i) = u(i);
    z(3 * i + 1) = v(i);
    z(3 * i + 2) = w(i);
  }

  // pseudo-transient continuation; plain Newton is thrown off by the slow even mode
  SpMat I(3 * n_grid, 3 * n_grid);
  I.setIdentity();
  double dt = 1.0;
  Eigen::VectorXd F = steady_residual(z, p, st.dx);
  double fnorm = F.norm();
  bool done = false;
  int it = 0;
  for (; it < 400 && !done; ++it) {
    Eigen::VectorXd uu(n_grid);
    for (int i = 0; i < n_grid; ++i) uu(i) = z(3 * i);
    SpMat A = I * (1.0 / dt) - jacobian(uu, p, st.dx, Parity::even);
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error(Errc::no_convergence, "discrete steady state: singular step");
    const Eigen::VectorXd dz = lu.solve(F);
    z += dz;
    Eigen::VectorXd Fn = steady_residual(z, p, st.dx);
    const double nn = Fn.norm();
    dt = std::min(1e12, dt * std::clamp(fnorm / nn, 0.5, 10.0));
    F = std::move(Fn);
    fnorm = nn;
    done = dz.cwiseAbs().maxCoeff() < 1e-11;
  }
  if (!done) throw Error(Errc::no_convergence, "discrete steady state: continuation did not settle");
  st.iterations = it;
  st.residual = F.cwiseAbs().maxCoeff();
  st.u.resize(n_grid);
  st.v.resize(n_grid);
  st.w.resize(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    st.u(i) = z(3 * i);
    st.v(i) = z(3 * i + 1);
    st.w(i) = z(3 * i + 2);
  }
  return st;
}

namespace {

using CSpMat = Eigen::SparseMatrix<cplx>;

std::vector<cplx> shift_invert(const SpMat& J, const Eigen::VectorXd& T, int k, cplx shift) {
  const Eigen::Index N = J.rows();
  CSpMat A = J.cast<cplx>();
  for (Eigen::Index i = 0; i < N; ++i) A.coeffRef(i, i) -= shift * T(i);
  A.makeCompressed();
  Eigen::SparseLU<CSpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error(Errc::no_convergence, "shift-invert: factorization failed");

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd start(N);
  for (Eigen::Index i = 0; i < N; ++i) start(i) = nd(rng);

  for (int m = std::max(2 * k + 10, 30);; m *= 2) {
    Eigen::MatrixXcd V(N, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    V.col(0) = start.normalized();
    int used = m;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = lu.solve(Eigen::VectorXcd(T.cast<cplx>().cwiseProduct(V.col(j))));
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cplx h = V.col(i).dot(w);
          H(i, j) += h;
          w -= h * V.col(i);
        }
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) < 1e-14 * H.col(j).norm()) {
        used = j + 1;
        break;
      }
      V.col(j + 1) = w / H(j + 1, j);
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(used, used));
    std::vector<int> order(used);
    for (int i = 0; i < used; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b)); });
    const int take = std::min(k, used);
    bool ok = true;
    std::vector<cplx> out;
    for (int r = 0; r < take; ++r) {
      const int i = order[r];
      const cplx mu = es.eigenvalues()(i);
      const double resid = used < m ? 0.0 : std::abs(H(m, m - 1)) * std::abs(es.eigenvectors()(used - 1, i));
      if (resid > 1e-10 * std::abs(mu)) ok = false;
      out.push_back(shift + 1.0 / mu);
    }
    if (ok || used < m) return out;
    if (m >= 480) throw Error(Errc::no_convergence, "shift-invert: Ritz values did not converge");
  }
}

}  // namespace

std::vector<DiscreteEigen> discrete_linearization_eigs(const DiscreteSteadyState& st, const ModelParams& p,
                                                       const TimeScale& ts, int n_eigs, cplx shift) {
  if (n_eigs < 1) throw Error(Errc::domain_error, "discrete eigenvalues: n_eigs must be positive");
  const auto o1 = ts.to_order1(p);
  const Eigen::Index n = st.u.size();
  Eigen::VectorXd T(3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    T(3 * i) = 1.0;
    T(3 * i + 1) = o1.first();
    T(3 * i + 2) = o1.second();
  }
  std::vector<DiscreteEigen> out;
  for (Parity par : {Parity::even, Parity::odd}) {
    for (cplx l : shift_invert(jacobian(st.u, p, st.dx, par), T, n_eigs, shift)) out.push_back({l, par});
  }
  std::stable_sort(out.begin(), out.end(), [&](const DiscreteEigen& a, const DiscreteEigen& b) {
    return std::abs(a.lambda - shift) < std::abs(b.lambda - shift);
  });
  out.resize(std::min<std::size_t>(out.size(), static_cast<std::size_t>(n_eigs)));
  return out;
}

std::vector<DiscreteEigen> discrete_linearization_eigs(const PulseSolution& pulse, const TimeScale& ts,
                                                       int n_grid, int n_eigs, cplx shift, double L) {
  return discrete_linearization_eigs(discrete_steady_state(pulse, n_grid, L), pulse.params(), ts, n_eigs,
                                     shift);
}

}  // namespace sleppulse
