// Spectral-core operator tests: basis round trips, norms against a real-space
// quadrature oracle, Biot-Savart identities, advection antisymmetry, and the
// exact closed forms of B on basis pairs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsq/brackets.hpp"
#include "bsq/fft.hpp"
#include "bsq/noise.hpp"
#include "bsq/ops.hpp"

using namespace bsq;

namespace {

SpectralState random_state(int n_trunc, uint64_t seed, int max_mode = -1, double amp = 1.0) {
  Gaussian gen(seed);
  SpectralState u(n_trunc);
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    if (max_mode >= 0 && tr.mode(i).max_norm() > max_mode) continue;
    for (int s = 0; s < 4; ++s) u.at(i, (Slot)s) = amp * gen();
  }
  return u;
}

// Midpoint quadrature of the integral of f over [-pi,pi]^2 from grid samples
// (exact for band-limited integrands below the grid Nyquist).
double quad_integral(const std::vector<double>& grid, int m) {
  double acc = 0.0;
  for (double v : grid) acc += v;
  return acc * (2.0 * M_PI / m) * (2.0 * M_PI / m);
}

}  // namespace

TEST_CASE("basis vectors land on the requested coefficient") {
  SpectralState s = basis_vector({Kind::Sigma, {1, 0}, 0}, 4);
  CHECK(s.coeff({1, 0}, kThetaCos) == 1.0);
  CHECK(norm(s) == 1.0);

  SpectralState ps = basis_vector({Kind::Psi, {0, 1}, 1}, 4);
  CHECK(ps.coeff({0, 1}, kOmegaSin) == 1.0);

  CHECK_THROWS_AS(basis_vector({Kind::Sigma, {5, 0}, 0}, 4), std::out_of_range);
}

TEST_CASE("basis is orthonormal under the coefficient pairing, |j| <= 3") {
  const int nt = 3;
  std::vector<BasisElement> all;
  for (const auto& j : truncation(nt).modes())
    for (int m = 0; m < 2; ++m) {
      all.push_back({Kind::Sigma, j, m});
      all.push_back({Kind::Psi, j, m});
    }
  for (size_t a = 0; a < all.size(); ++a)
    for (size_t b = a; b < all.size(); ++b) {
      const double ip = inner(basis_vector(all[a], nt), basis_vector(all[b], nt));
      CHECK(ip == (a == b ? 1.0 : 0.0));
    }
}

TEST_CASE("weighted norm matches the real-space quadrature oracle") {
  PhysParams p(1.0, 1.0, 1.0);
  SpectralState u = basis_vector({Kind::Sigma, {1, 0}, 0}, 4);
  // U = cos(x1): ||U||^2 = integral of cos^2 = 2 pi^2
  CHECK(weighted_norm(u, p) * weighted_norm(u, p) == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-12));

  CHECK(weighted_norm(SpectralState(4), p) == 0.0);

  // scaling homogeneity
  SpectralState r = random_state(6, 7);
  CHECK(weighted_norm(3.5 * r, p) == doctest::Approx(3.5 * weighted_norm(r, p)).epsilon(1e-12));

  // Parseval vs quadrature on a random state, both components
  PhysParams p2(2.0, 0.5, 1.3);
  SpectralState v = random_state(5, 11);
  auto& ws = fft::workspace(fft::pad_size(5));
  std::vector<double> go, gt;
  ws.synth(v.trunc(), v.data().data(), 4, kOmegaCos, kOmegaSin, go);
  ws.synth(v.trunc(), v.data().data(), 4, kThetaCos, kThetaSin, gt);
  for (auto& x : go) x *= x;
  for (auto& x : gt) x *= x;
  const double direct = p2.omega_weight() * quad_integral(go, ws.size()) + quad_integral(gt, ws.size());
  CHECK(weighted_norm(v, p2) * weighted_norm(v, p2) ==
        doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("sobolev norm multipliers") {
  PhysParams p;
  SpectralState u = basis_vector({Kind::Sigma, {0, 2}, 0}, 4);
  CHECK(sobolev_norm(u, p, 0.0) == doctest::Approx(weighted_norm(u, p)).epsilon(1e-14));
  CHECK(sobolev_norm(u, p, 1.0) == doctest::Approx(2.0 * sobolev_norm(u, p, 0.0)).epsilon(1e-14));

  // Poincare: ||U||_H1 >= ||U|| for mean-zero states
  for (uint64_t s = 0; s < 20; ++s) {
    SpectralState r = random_state(6, 100 + s);
    CHECK(sobolev_norm(r, p, 1.0) >= weighted_norm(r, p) - 1e-12);
  }
}

TEST_CASE("biot-savart: single mode analytic inversion") {
  SpectralState u(4);
  u.coeff({1, 0}, kOmegaCos) = 1.0;  // omega = cos(x1)
  Velocity vel = biot_savart(u);
  // u = (0, sin(x1))
  const int i10 = u.trunc().index_of({1, 0});
  CHECK(vel.a[4 * i10 + 0] == 0.0);
  CHECK(vel.a[4 * i10 + 1] == 0.0);
  CHECK(vel.a[4 * i10 + 2] == 0.0);
  CHECK(vel.a[4 * i10 + 3] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("biot-savart: curl and divergence identities on random states") {
  SpectralState u = random_state(8, 21);
  Velocity vel = biot_savart(u);
  SpectralState curl = curl_of(vel);
  SpectralState divg = divergence_of(vel);
  double curl_err = 0.0, div_err = 0.0;
  const auto& tr = u.trunc();
  for (int i = 0; i < tr.size(); ++i) {
    curl_err = std::max(curl_err, std::abs(curl.at(i, kOmegaCos) - u.at(i, kOmegaCos)));
    curl_err = std::max(curl_err, std::abs(curl.at(i, kOmegaSin) - u.at(i, kOmegaSin)));
    div_err = std::max(div_err, std::abs(divg.at(i, kOmegaCos)));
    div_err = std::max(div_err, std::abs(divg.at(i, kOmegaSin)));
  }
  CHECK(curl_err < 1e-12);
  CHECK(div_err < 1e-12);

  Velocity z = biot_savart(SpectralState(8));
  for (double x : z.a) CHECK(x == 0.0);
}

TEST_CASE("advection by a temperature-only state vanishes exactly") {
  SpectralState theta_only = random_state(6, 31);
  for (int i = 0; i < theta_only.trunc().size(); ++i) {
    theta_only.at(i, kOmegaCos) = 0.0;
    theta_only.at(i, kOmegaSin) = 0.0;
  }
  SpectralState v = random_state(6, 32);
  SpectralState b = advect_B(theta_only, v);
  CHECK(norm(b) == 0.0);
}

TEST_CASE("transport antisymmetry: <B(U,V), V> = 0 componentwise") {
  for (uint64_t s = 0; s < 100; ++s) {
    SpectralState u = random_state(5, 1000 + s);
    SpectralState v = random_state(5, 2000 + s);
    SpectralState b = advect_B(u, v);
    // componentwise pairing: omega block and theta block separately
    double om = 0.0, th = 0.0, nom = 0.0, nth = 0.0;
    for (int i = 0; i < u.trunc().size(); ++i) {
      om += b.at(i, kOmegaCos) * v.at(i, kOmegaCos) + b.at(i, kOmegaSin) * v.at(i, kOmegaSin);
      th += b.at(i, kThetaCos) * v.at(i, kThetaCos) + b.at(i, kThetaSin) * v.at(i, kThetaSin);
      nom += v.at(i, kOmegaCos) * v.at(i, kOmegaCos) + v.at(i, kOmegaSin) * v.at(i, kOmegaSin);
      nth += v.at(i, kThetaCos) * v.at(i, kThetaCos) + v.at(i, kThetaSin) * v.at(i, kThetaSin);
    }
    CHECK(std::abs(om) <= 1e-10 * std::max(1.0, nom));
    CHECK(std::abs(th) <= 1e-10 * std::max(1.0, nth));
  }
}

TEST_CASE("buoyancy G on basis elements") {
  PhysParams p(1.0, 1.0, 2.5);
  for (int m = 0; m < 2; ++m) {
    for (const ModeIndex j : {ModeIndex{1, 0}, ModeIndex{2, -1}, ModeIndex{0, 1}}) {
      SpectralState g = buoyancy_G(basis_vector({Kind::Sigma, j, m}, 4), p);
      // G sigma_j^m = (-1)^{m+1} g j1 psi_j^{m+1}
      SpectralState expect(4);
      const double c = (m % 2 == 0 ? -1.0 : 1.0) * p.g * j.j1;
      if (j.j1 != 0)
        expect.coeff(j, (m + 1) % 2 == 0 ? kOmegaCos : kOmegaSin) = c;
      CHECK(norm(g - expect) < 1e-14);
    }
    // G annihilates omega-only states
    SpectralState g2 = buoyancy_G(basis_vector({Kind::Psi, {2, 1}, m}, 4), p);
    CHECK(norm(g2) == 0.0);
  }
}

TEST_CASE("dissipation A is the diagonal multiplier") {
  PhysParams p(2.0, 3.0, 1.0);
  SpectralState s = dissipation_A(basis_vector({Kind::Sigma, {1, 2}, 0}, 4), p);
  CHECK(s.coeff({1, 2}, kThetaCos) == doctest::Approx(3.0 * 5.0).epsilon(1e-15));
  SpectralState w = dissipation_A(basis_vector({Kind::Psi, {1, 2}, 1}, 4), p);
  CHECK(w.coeff({1, 2}, kOmegaSin) == doctest::Approx(2.0 * 5.0).epsilon(1e-15));

  // coercivity <AU,U>_w >= kappa ||U||_w^2
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SpectralState u = random_state(6, 300 + seed);
    CHECK(weighted_inner(dissipation_A(u, p), u, p) >=
          p.kappa() * weighted_inner(u, u, p) - 1e-9);
  }
}

TEST_CASE("projections: decomposition, idempotence, band membership") {
  SpectralState u = random_state(8, 41);
  SpectralState lo = project(u, 4, Band::Low);
  SpectralState hi = project(u, 4, Band::High);
  CHECK(norm(u - (lo + hi)) == 0.0);
  CHECK(norm(project(lo, 4, Band::Low) - lo) == 0.0);

  SpectralState s = basis_vector({Kind::Sigma, {3, 4}, 0}, 8);  // |j| = 5
  CHECK(norm(project(s, 5, Band::Low) - s) == 0.0);
  CHECK(norm(project(s, 4, Band::Low)) == 0.0);
}

TEST_CASE("drift F: fixed point at zero and composition from parts") {
  PhysParams p(1.0, 2.0, -1.5);
  CHECK(norm(drift_F(SpectralState(6), p)) == 0.0);

  // F(sigma_j^m) = -nu2 |j|^2 sigma_j^m + (-1)^{m+1} g j1 psi_j^{m+1}
  const ModeIndex j{2, 1};
  for (int m = 0; m < 2; ++m) {
    SpectralState f = drift_F(basis_vector({Kind::Sigma, j, m}, 6), p);
    SpectralState expect(6);
    expect.coeff(j, m == 0 ? kThetaCos : kThetaSin) = -p.nu2 * j.norm2();
    expect.coeff(j, (m + 1) % 2 == 0 ? kOmegaCos : kOmegaSin) =
        (m % 2 == 0 ? -1.0 : 1.0) * p.g * j.j1;
    CHECK(norm(f - expect) < 1e-12);
  }

  for (uint64_t s = 0; s < 5; ++s) {
    SpectralState u = random_state(6, 400 + s);
    SpectralState parts = buoyancy_G(u, p);
    parts -= dissipation_A(u, p);
    parts -= advect_B(u, u);
    CHECK(norm(drift_F(u, p) - parts) < 1e-12);
  }
}

TEST_CASE("closed forms of B(psi, sigma) and B(psi, psi) are exact, |j|,|k| <= 4") {
  const int nt = 8;
  for (int j1 = 0; j1 <= 4; ++j1)
    for (int j2 = -4; j2 <= 4; ++j2) {
      const ModeIndex j{j1, j2};
      if (!j.canonical() || j.norm2() > 16) continue;
      for (int k1 = 0; k1 <= 4; ++k1)
        for (int k2 = -4; k2 <= 4; ++k2) {
          const ModeIndex k{k1, k2};
          if (!k.canonical() || k.norm2() > 16) continue;
          for (int m = 0; m < 2; ++m)
            for (int m2 = 0; m2 < 2; ++m2) {
              SpectralState lhs_s = advect_B(basis_vector({Kind::Psi, j, m}, nt),
                                             basis_vector({Kind::Sigma, k, m2}, nt));
              SpectralState rhs_s = closed_B_psi_sigma(j, m, k, m2).materialize(nt);
              CHECK(norm(lhs_s - rhs_s) < 1e-12);

              SpectralState lhs_p = advect_B(basis_vector({Kind::Psi, j, m}, nt),
                                             basis_vector({Kind::Psi, k, m2}, nt));
              SpectralState rhs_p = closed_B_psi_psi(j, m, k, m2).materialize(nt);
              CHECK(norm(lhs_p - rhs_p) < 1e-12);
            }
        }
    }
}

TEST_CASE("single product identity: B(psi_(1,0)^0, sigma_(0,1)^0)") {
  // u = K*cos(x1) = (0, sin x1); advecting cos(x2) gives -sin x1 sin x2
  // = (1/2) cos((1,1).x) - (1/2) cos((1,-1).x).
  SpectralState b = advect_B(basis_vector({Kind::Psi, {1, 0}, 0}, 4),
                             basis_vector({Kind::Sigma, {0, 1}, 0}, 4));
  CHECK(b.coeff({1, 1}, kThetaCos) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(b.coeff({1, -1}, kThetaCos) == doctest::Approx(-0.5).epsilon(1e-13));
  SpectralState rest = b;
  rest.coeff({1, 1}, kThetaCos) = 0.0;
  rest.coeff({1, -1}, kThetaCos) = 0.0;
  CHECK(norm(rest) < 1e-13);
}

TEST_CASE("canonicalization folds reflected modes with parity signs") {
  auto cm = canonicalize({-1, 1});
  CHECK(cm.index == ModeIndex{1, -1});
  CHECK(cm.flipped);
  CHECK_THROWS(canonicalize({0, 0}));

  SpectralState u(3);
  u.add_folded({-2, 1}, false, 1, 1.0);  // sin(-j.x) = -sin(j.x)
  CHECK(u.coeff({2, -1}, kThetaSin) == -1.0);
  u.add_folded({-2, 1}, false, 0, 1.0);  // cos unchanged
  CHECK(u.coeff({2, -1}, kThetaCos) == 1.0);
}
