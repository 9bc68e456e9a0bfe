#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmrabi/chain.hpp"
#include "mmrabi/exact.hpp"
#include "mmrabi/mps.hpp"
#include "mmrabi/ops.hpp"
#include "support.hpp"

using namespace mmrabi;

namespace {

ModelParams chain_params(double g, int m, int d) {
  ModelParams p;
  p.g = g;
  p.mode_count = m;
  p.fock_cutoff = d;
  return p;
}

// Exact reference for the same truncated chain model.
ExactEvolution exact_reference(const ModelParams& p, const ChainMapping& mapping,
                               const std::vector<double>& times) {
  const FockBasis basis = FockBasis::for_params(p);
  const auto h = assemble_hamiltonian(chain_terms(p, mapping), basis);
  Eigen::VectorXcd emitter = Eigen::VectorXcd::Zero(p.emitter_cutoff);
  emitter(1) = 1.0;
  return evolve_exact(h, basis, product_state_vector(basis, emitter), times);
}

}  // namespace

TEST_CASE("decoupled emitter keeps unit population") {
  ModelParams p = chain_params(0.0, 3, 4);
  const auto mapping = build_chain_mapping(3);
  GateSet gates(p, mapping);
  EvolutionConfig config;
  config.dt = two_pi / 400.0;
  config.t_final = 1.0 * two_pi;
  MpsState state = init_product_state(p, EmitterInit::excited);
  const auto result = evolve(state, gates, config);
  for (double pop : result.emitter_population) {
    CHECK(pop == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (const auto& occ : result.site_occupations) {
    CHECK(occ.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("TEBD matches exact evolution for M = 3, d = 5, g = 0.3") {
  ModelParams p = chain_params(0.3, 3, 5);
  const auto mapping = build_chain_mapping(3);
  GateSet gates(p, mapping);
  EvolutionConfig config;      // defaults: dt = 2 pi / 2000, chi 64, cut 1e-10
  config.t_final = 0.5 * two_pi;  // half a roundtrip keeps the unit test quick
  config.stride = 20;

  MpsState state = init_product_state(p, EmitterInit::excited);
  const auto mps = evolve(state, gates, config);
  const auto exact = exact_reference(p, mapping, mps.times);

  double worst = 0.0;
  for (std::size_t i = 0; i < mps.times.size(); ++i) {
    worst = std::max(worst, std::abs(mps.emitter_population[i] - exact.emitter_population[i]));
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(mps.site_occupations[i](k) - exact.site_occupations[i](k)));
    }
  }
  CHECK(worst < 1e-3);
  CHECK(mps.norm_drift < 1e-6);
}

TEST_CASE("second-order Trotter convergence (Richardson self-test)") {
  ModelParams p = chain_params(0.4, 3, 4);
  const auto mapping = build_chain_mapping(3);
  GateSet gates(p, mapping);

  auto population_error = [&](double dt) {
    EvolutionConfig config;
    config.dt = dt;
    config.t_final = 0.25 * two_pi;
    config.stride = std::max(1, int(std::lround(config.t_final / dt)));
    config.svd_cut = 1e-13;  // keep truncation far below the Trotter error
    MpsState state = init_product_state(p, EmitterInit::excited);
    const auto mps = evolve(state, gates, config);
    const auto exact = exact_reference(p, mapping, {mps.times.back()});
    return std::abs(mps.emitter_population.back() - exact.emitter_population.back());
  };

  const double coarse = population_error(0.25 * two_pi / 50.0);
  const double fine = population_error(0.25 * two_pi / 100.0);
  // Global error O(dt^2): halving dt shrinks the error by ~4.
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.45));
}

TEST_CASE("circuit light cone: correlations vanish beyond the swept bonds") {
  ModelParams p = chain_params(0.8, 6, 3);
  const auto mapping = build_chain_mapping(6);
  GateSet gates(p, mapping);
  MpsState state = init_product_state(p, EmitterInit::excited);

  // One even layer reaches chain site 1 (bonds 0, 2, 4 act on vacuum pairs
  // beyond the head); one odd layer extends the support by one more site.
  const double dt = 0.05;
  for (int j = 0; j < gates.bond_count(); j += 2) {
    state.apply_two_site_gate(j, gates.gate(j, dt, EvolutionConfig::Mode::real_time), 8,
                              1e-14, true);
  }
  auto corr = state.correlation_matrix(1, 6, ops::annihilation(3));
  for (int i = 1; i < 6; ++i) CHECK(std::abs(corr(i, i)) < 1e-14);

  for (int j = 1; j < gates.bond_count(); j += 2) {
    state.apply_two_site_gate(j, gates.gate(j, dt, EvolutionConfig::Mode::real_time), 8,
                              1e-14, true);
  }
  corr = state.correlation_matrix(1, 6, ops::annihilation(3));
  CHECK(std::abs(corr(1, 1)) > 1e-12);            // reached by the odd layer
  for (int i = 2; i < 6; ++i) CHECK(std::abs(corr(i, i)) < 1e-14);
}

TEST_CASE("real-time norm drift and energy conservation over three roundtrips") {
  ModelParams p = chain_params(0.6, 6, 8);
  const auto mapping = build_chain_mapping(6);
  GateSet gates(p, mapping);
  EvolutionConfig config;  // defaults: dt = 2 pi/2000, chi 64, svd_cut 1e-10
  config.stride = 100;

  MpsState state = init_product_state(p, EmitterInit::excited);
  const auto result = evolve(state, gates, config);
  CHECK(result.norm_drift < 1e-6);
  CHECK(std::abs(result.final_energy - result.initial_energy) /
            std::max(1.0, std::abs(result.initial_energy)) <
        1e-4);
  CHECK(result.discarded_total >= 0.0);
}

TEST_CASE("imaginary time finds the ground state") {
  SUBCASE("decoupled limit: energy -omega_x/2, empty chain") {
    ModelParams p = chain_params(0.0, 2, 4);
    const auto mapping = build_chain_mapping(2);
    GroundStateConfig config;
    config.schedule = {{0.1, 200}, {0.02, 200}};
    const auto result = ground_state_imaginary(p, mapping, config);
    CHECK(result.energy == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(result.emitter_population == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(result.chain_correlations.cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("M = 2, d = 6, g = 0.3: energy matches exact diagonalization") {
    ModelParams p = chain_params(0.3, 2, 6);
    const auto mapping = build_chain_mapping(2);
    const auto result = ground_state_imaginary(p, mapping);

    const FockBasis basis = FockBasis::for_params(p);
    const auto exact = lowest_levels(assemble_hamiltonian(chain_terms(p, mapping), basis),
                                     basis, 2);
    CHECK(result.energy == doctest::Approx(exact.energies(0)).epsilon(1e-6));
    CHECK(result.converged);
    // Monotone energy descent along the trace (Trotter noise floor allowed).
    for (std::size_t i = 1; i < result.energy_trace.size(); ++i) {
      CHECK(result.energy_trace[i] <= result.energy_trace[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("Kerr emitter runs through the identical pipeline") {
  ModelParams p = chain_params(0.4, 2, 5);
  p.emitter = EmitterKind::make_kerr(10.0);
  p.emitter_cutoff = 3;
  const auto mapping = build_chain_mapping(2);
  GateSet gates(p, mapping);
  EvolutionConfig config;
  config.dt = two_pi / 1000.0;
  config.t_final = 0.25 * two_pi;
  config.stride = 25;

  MpsState state = init_product_state(p, EmitterInit::excited);
  const auto mps = evolve(state, gates, config);
  const auto exact = exact_reference(p, mapping, mps.times);
  for (std::size_t i = 0; i < mps.times.size(); ++i) {
    CHECK(mps.emitter_population[i] ==
          doctest::Approx(exact.emitter_population[i]).epsilon(1e-4));
  }
}
