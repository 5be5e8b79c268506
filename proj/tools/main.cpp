// Command-line front end: amplitude estimation, outcome distributions and
// sampling, contour-field export, and the reduction/robustness experiments.
// Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4 numerical
// assertion failed. Output is deterministic for fixed inputs and seeds.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cviqp/circuit.hpp"
#include "cviqp/contour.hpp"
#include "cviqp/csv_io.hpp"
#include "cviqp/errors.hpp"
#include "cviqp/hardness.hpp"
#include "cviqp/integrator.hpp"
#include "cviqp/json_io.hpp"
#include "cviqp/reduce.hpp"
#include "cviqp/rng.hpp"
#include "cviqp/sampler.hpp"

namespace {

using cviqp::ValidationError;

constexpr double kPi = 3.14159265358979323846264338328;

double parse_double_token(const std::string& token, const char* what) {
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || token.empty())
    throw ValidationError(std::string("cannot parse ") + what + " value \"" + token + "\"");
  return value;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> tokens;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) tokens.push_back(token);
  return tokens;
}

Eigen::VectorXd parse_vector(const std::string& text, int n, const char* what) {
  if (text.empty()) return Eigen::VectorXd::Zero(n);
  const auto tokens = split_commas(text);
  if (static_cast<int>(tokens.size()) != n)
    throw ValidationError(std::string(what) + " needs " + std::to_string(n) +
                          " comma-separated values");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = parse_double_token(tokens[static_cast<std::size_t>(i)], what);
  return v;
}

struct GridOptions {
  double L = 0.0;
  int k = 0;
  double target = 1e-6;
  bool have_L = false;
  bool have_k = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--L", L, "grid half-width (with --k)")->check(CLI::PositiveNumber);
    cmd->add_option("--k", k, "log2 grid points per mode (with --L)")
        ->check(CLI::Range(1, 62));
    cmd->add_option("--target-trunc", target,
                    "Gaussian tail mass target for the automatic grid")
        ->check(CLI::Range(1e-300, 0.999));
    have_flags = {cmd->get_option("--L"), cmd->get_option("--k")};
  }

  cviqp::GridSpec resolve(const cviqp::CircuitSpec& c) {
    have_L = have_flags[0] != nullptr && have_flags[0]->count() > 0;
    have_k = have_flags[1] != nullptr && have_flags[1]->count() > 0;
    if (have_L != have_k) throw ValidationError("--L and --k must be given together");
    if (have_L) return cviqp::make_grid(c.n_modes, L, k);
    return cviqp::default_grid(c, target);
  }

 private:
  std::array<CLI::Option*, 2> have_flags{nullptr, nullptr};
};

void warn_if_sinc_regime(const cviqp::CircuitSpec& c) {
  if (c.sinc_regime_flagged())
    std::cerr << "warning: sigma * delta_p = " << c.sigma * c.delta_p
              << " exceeds 0.01; window probabilities carry an uncontrolled "
                 "sinc-approximation error\n";
}

void emit_json(const cviqp::Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << '\n';
  else
    cviqp::save_json_file(out_path, j);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

bool bitwise_equal(std::complex<double> a, std::complex<double> b) {
  return std::bit_cast<std::uint64_t>(a.real()) == std::bit_cast<std::uint64_t>(b.real()) &&
         std::bit_cast<std::uint64_t>(a.imag()) == std::bit_cast<std::uint64_t>(b.imag());
}

void apply_budgets(std::int64_t grid_flag, std::int64_t outcome_flag) {
  if (grid_flag > 0) {
    cviqp::set_grid_budget(grid_flag);
  } else if (const char* env = std::getenv("CVIQP_BUDGET")) {
    char* end = nullptr;
    const long long parsed = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || parsed <= 0)
      throw ValidationError("CVIQP_BUDGET must be a positive integer");
    cviqp::set_grid_budget(parsed);
  }
  if (outcome_flag > 0) cviqp::set_outcome_budget(outcome_flag);
}

int log2_exact(std::int64_t value, const char* what) {
  if (value < 2 || (value & (value - 1)) != 0)
    throw ValidationError(std::string(what) + " must be a power of two, at least 2");
  int bits = 0;
  while ((std::int64_t{1} << bits) < value) ++bits;
  return bits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-variable circuit amplitudes as oscillatory integrals"};
  app.require_subcommand(1);

  int threads = 0;
  std::int64_t budget_flag = 0;
  std::int64_t outcome_budget_flag = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)")
      ->check(CLI::Range(0, 1024));
  app.add_option("--budget", budget_flag,
                 "max quadrature grid points (overrides CVIQP_BUDGET)")
      ->check(CLI::PositiveNumber);
  app.add_option("--outcome-budget", outcome_budget_flag, "max outcome lattice size")
      ->check(CLI::PositiveNumber);

  // amplitude -------------------------------------------------------------
  auto* amp = app.add_subcommand("amplitude", "estimate one outcome amplitude");
  amp->fallthrough();
  std::string amp_circuit, amp_method = "squeezed_grid", amp_s, amp_out;
  GridOptions amp_grid;
  std::int64_t amp_bins = 256, amp_samples = 100000;
  std::uint64_t amp_seed = 1;
  bool amp_richardson = false;
  amp->add_option("--circuit", amp_circuit, "circuit JSON file")->required();
  amp->add_option("--method", amp_method, "estimator")
      ->check(CLI::IsMember(
          {"riemann", "binned", "squeezed_grid", "squeezed_mc", "gaussian_closed"}));
  amp->add_option("--s", amp_s, "outcome point, comma-separated (default 0)");
  amp_grid.attach(amp);
  amp->add_option("--bins", amp_bins, "phase bin count for --method binned");
  amp->add_option("--samples", amp_samples, "sample count for --method squeezed_mc")
      ->check(CLI::PositiveNumber);
  amp->add_option("--seed", amp_seed, "random seed for --method squeezed_mc");
  amp->add_flag("--richardson", amp_richardson,
                "estimate discretization error from one grid refinement");
  amp->add_option("--out", amp_out, "output JSON path (default stdout)");

  // prob ------------------------------------------------------------------
  auto* prob = app.add_subcommand("prob", "tabulate the outcome distribution");
  prob->fallthrough();
  std::string prob_circuit, prob_out;
  GridOptions prob_grid;
  bool prob_normalize = false;
  prob->add_option("--circuit", prob_circuit, "circuit JSON file")->required();
  prob_grid.attach(prob);
  prob->add_flag("--normalize", prob_normalize, "rescale to total mass 1");
  prob->add_option("--out", prob_out, "output CSV path (default stdout)");

  // sample ----------------------------------------------------------------
  auto* samp = app.add_subcommand("sample", "draw outcomes from the distribution");
  samp->fallthrough();
  std::string samp_circuit, samp_out;
  GridOptions samp_grid;
  std::int64_t samp_count = 1000;
  std::uint64_t samp_seed = 1;
  samp->add_option("--circuit", samp_circuit, "circuit JSON file")->required();
  samp_grid.attach(samp);
  samp->add_option("--count", samp_count, "number of draws")->check(CLI::PositiveNumber);
  samp->add_option("--seed", samp_seed, "random seed");
  samp->add_option("--out", samp_out, "output CSV path (default stdout)");

  // contour ---------------------------------------------------------------
  auto* cont = app.add_subcommand("contour", "export integrand contour fields");
  cont->fallthrough();
  std::string cont_circuit, cont_sigmas = "inf,3,1.5,1", cont_prefix = "contour";
  int cont_resolution = 400;
  double cont_L = 4.0;
  cont->add_option("--circuit", cont_circuit, "circuit JSON file (two-mode polynomial)")
      ->required();
  cont->add_option("--sigmas", cont_sigmas, "comma-separated widths; \"inf\" allowed");
  cont->add_option("--resolution", cont_resolution, "points per axis")
      ->check(CLI::Range(2, 20000));
  cont->add_option("--L", cont_L, "half-width of the plotted square")
      ->check(CLI::PositiveNumber);
  cont->add_option("--out-prefix", cont_prefix, "output files <prefix>_sigma_<w>.csv");

  // experiment ------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "run a reduction or robustness check");
  exp->fallthrough();
  std::string exp_kind, exp_circuit, exp_oracles, exp_s, exp_r, exp_out;
  GridOptions exp_grid;
  double exp_sharp_L = kPi, exp_fool_L = 4.0;
  double exp_delta = 0.2, exp_sigma = 1.0, exp_alpha = 0.5;
  double exp_shift_range = 1.0, exp_eps = 1.0 / 64.0, exp_markov_delta = 1.0 / 8.0;
  int exp_modes = 2, exp_k = 8;
  std::int64_t exp_nodes = 16, exp_trials = 0;
  std::uint64_t exp_seed = 1;
  exp->add_option("--kind", exp_kind, "experiment type")
      ->required()
      ->check(CLI::IsMember({"sharp-p", "fooling", "anticonc", "hide-check", "markov"}));
  exp->add_option("--circuit", exp_circuit, "circuit JSON file");
  exp->add_option("--oracles", exp_oracles, "oracle JSON file (sharp-p)");
  exp->add_option("--sharp-L", exp_sharp_L, "grid half-width for sharp-p");
  exp->add_option("--modes", exp_modes, "mode count (fooling)")->check(CLI::Range(1, 8));
  exp->add_option("--nodes", exp_nodes, "node count (fooling)")->check(CLI::PositiveNumber);
  exp->add_option("--delta", exp_delta, "node ball radius parameter (fooling)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--sigma", exp_sigma, "envelope width (fooling)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--fool-L", exp_fool_L, "grid half-width (fooling)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--fool-k", exp_k, "log2 grid points per mode (fooling)")
      ->check(CLI::Range(1, 30));
  exp->add_option("--alpha", exp_alpha, "threshold fraction (anticonc)")
      ->check(CLI::Range(1e-9, 0.999999999));
  exp->add_option("--trials", exp_trials, "sampled shifts; 0 = exhaustive (anticonc)");
  exp->add_option("--s", exp_s, "outcome point (hide-check)");
  exp->add_option("--r", exp_r, "displacement vector (hide-check; random if absent)");
  exp->add_option("--shift-range", exp_shift_range, "random displacement range (hide-check)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--eps", exp_eps, "l1 perturbation size (markov)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--markov-delta", exp_markov_delta, "heavy-fraction bound (markov)")
      ->check(CLI::Range(1e-9, 0.999999999));
  exp->add_option("--seed", exp_seed, "random seed");
  exp_grid.attach(exp);
  exp->add_option("--out", exp_out, "output JSON path (default stdout)");

  try {
    app.parse(argc, argv);
    apply_budgets(budget_flag, outcome_budget_flag);
    if (threads > 0) cviqp::set_max_threads(threads);

    if (app.got_subcommand(amp)) {
      const cviqp::CircuitSpec c = cviqp::circuit_from_json(cviqp::load_json_file(amp_circuit));
      const Eigen::VectorXd s = parse_vector(amp_s, c.n_modes, "--s");
      cviqp::QuadratureOptions opts;
      opts.richardson = amp_richardson;
      cviqp::Json j;
      if (amp_method == "riemann") {
        j = estimate_json(cviqp::riemann_amplitude(c.phase, s, amp_grid.resolve(c), opts));
      } else if (amp_method == "binned") {
        const int l = log2_exact(amp_bins, "--bins");
        const auto [est, report] =
            cviqp::binned_amplitude(c.phase, s, amp_grid.resolve(c), l, opts);
        j = estimate_json(est);
        j["bin_counts"] = report.counts;
      } else if (amp_method == "squeezed_grid") {
        j = estimate_json(cviqp::squeezed_amplitude_grid(c, s, amp_grid.resolve(c), opts));
      } else if (amp_method == "squeezed_mc") {
        j = estimate_json(cviqp::squeezed_amplitude_mc(c, s, amp_samples, amp_seed));
      } else {
        cviqp::AmplitudeEstimate est;
        est.method = "gaussian_closed";
        est.value = cviqp::gaussian_closed_form(c.phase.materialized(), s, c.sigma, c.delta_p);
        j = estimate_json(est);
      }
      emit_json(j, amp_out);
    } else if (app.got_subcommand(prob)) {
      const cviqp::CircuitSpec c =
          cviqp::circuit_from_json(cviqp::load_json_file(prob_circuit));
      warn_if_sinc_regime(c);
      cviqp::OutcomeDistribution d = cviqp::distribution(c, prob_grid.resolve(c));
      std::cerr << "total mass " << cviqp::format_g17(d.total_mass) << '\n';
      if (prob_normalize) d = cviqp::normalize(d);
      if (prob_out.empty()) {
        cviqp::write_distribution_csv(std::cout, d);
      } else {
        auto out = open_output(prob_out);
        cviqp::write_distribution_csv(out, d);
      }
    } else if (app.got_subcommand(samp)) {
      const cviqp::CircuitSpec c =
          cviqp::circuit_from_json(cviqp::load_json_file(samp_circuit));
      warn_if_sinc_regime(c);
      cviqp::OutcomeDistribution d = cviqp::distribution(c, samp_grid.resolve(c));
      std::cerr << "total mass " << cviqp::format_g17(d.total_mass)
                << "; normalizing before sampling\n";
      d = cviqp::normalize(d);
      const auto draws = cviqp::sample(d, samp_count, samp_seed);
      if (samp_out.empty()) {
        cviqp::write_samples_csv(std::cout, d.grid, draws);
      } else {
        auto out = open_output(samp_out);
        cviqp::write_samples_csv(out, d.grid, draws);
      }
    } else if (app.got_subcommand(cont)) {
      const cviqp::CircuitSpec c =
          cviqp::circuit_from_json(cviqp::load_json_file(cont_circuit));
      if (!c.phase.is_polynomial())
        throw ValidationError("contour export needs a polynomial phase");
      const cviqp::Polynomial p = c.phase.materialized();
      for (const std::string& token : split_commas(cont_sigmas)) {
        const double sigma = token == "inf"
                                 ? std::numeric_limits<double>::infinity()
                                 : parse_double_token(token, "--sigmas");
        const cviqp::ContourField field =
            cviqp::contour_field(p, sigma, cont_resolution, cont_L);
        const std::string path = cont_prefix + "_sigma_" + token + ".csv";
        auto out = open_output(path);
        cviqp::write_contour_csv(out, field);
        std::cerr << "wrote " << path << '\n';
      }
    } else if (app.got_subcommand(exp)) {
      cviqp::Json j;
      if (exp_kind == "sharp-p") {
        if (exp_oracles.empty()) throw ValidationError("sharp-p needs --oracles");
        const auto oracles = cviqp::oracles_from_json(cviqp::load_json_file(exp_oracles));
        int m = 0;
        while ((std::size_t{1} << m) < oracles.size()) ++m;
        m += oracles.front().arity;
        j = sharp_p_json(
            cviqp::verify_sharp_p_sum(oracles, cviqp::make_grid(1, exp_sharp_L, m)));
      } else if (exp_kind == "fooling") {
        cviqp::Rng rng(exp_seed);
        Eigen::MatrixXd nodes(exp_nodes, exp_modes);
        for (std::int64_t i = 0; i < exp_nodes; ++i)
          for (int mode = 0; mode < exp_modes; ++mode)
            nodes(i, mode) = rng.uniform(-exp_fool_L, exp_fool_L);
        const auto inst = cviqp::make_fooling_instance(std::move(nodes), exp_delta);
        const auto grid = cviqp::make_grid(exp_modes, exp_fool_L, exp_k);
        j = fooling_json(cviqp::fooling_demo(inst, exp_sigma, grid));
        j["node_bound"] =
            cviqp::fooling_node_bound(exp_modes, exp_sigma, exp_delta, 0.0, 0.0);
        j["bound_exponential"] = cviqp::fooling_bound_exponential(exp_sigma, exp_delta);
      } else if (exp_kind == "anticonc") {
        if (exp_circuit.empty()) throw ValidationError("anticonc needs --circuit");
        const cviqp::CircuitSpec c =
            cviqp::circuit_from_json(cviqp::load_json_file(exp_circuit));
        warn_if_sinc_regime(c);
        j = anticoncentration_json(cviqp::anticoncentration_report(
            c, exp_grid.resolve(c), exp_alpha, exp_trials, exp_seed));
      } else if (exp_kind == "hide-check") {
        if (exp_circuit.empty()) throw ValidationError("hide-check needs --circuit");
        const cviqp::CircuitSpec c =
            cviqp::circuit_from_json(cviqp::load_json_file(exp_circuit));
        const Eigen::VectorXd s = parse_vector(exp_s, c.n_modes, "--s");
        Eigen::VectorXd r;
        if (!exp_r.empty()) {
          r = parse_vector(exp_r, c.n_modes, "--r");
        } else {
          cviqp::Rng rng(exp_seed);
          r.resize(c.n_modes);
          for (int mode = 0; mode < c.n_modes; ++mode)
            r[mode] = rng.uniform(-exp_shift_range, exp_shift_range);
        }
        const cviqp::GridSpec g = exp_grid.resolve(c);
        const cviqp::CircuitSpec moved = cviqp::displace(c, r);
        const Eigen::VectorXd shifted = r + s;
        cviqp::AmplitudeEstimate via_displaced, via_shifted;
        if (c.sigma_finite()) {
          via_displaced = cviqp::squeezed_amplitude_grid(moved, s, g);
          via_shifted = cviqp::squeezed_amplitude_grid(c, shifted, g);
        } else {
          via_displaced = cviqp::riemann_amplitude(moved.phase, s, g);
          via_shifted = cviqp::riemann_amplitude(c.phase, shifted, g);
        }
        j["r"] = std::vector<double>(r.data(), r.data() + r.size());
        j["s"] = std::vector<double>(s.data(), s.data() + s.size());
        j["displaced"] = estimate_json(via_displaced);
        j["shifted"] = estimate_json(via_shifted);
        j["abs_gap"] = std::abs(via_displaced.value - via_shifted.value);
        j["bitwise_equal"] = bitwise_equal(via_displaced.value, via_shifted.value);
      } else {
        if (exp_circuit.empty()) throw ValidationError("markov needs --circuit");
        const cviqp::CircuitSpec c =
            cviqp::circuit_from_json(cviqp::load_json_file(exp_circuit));
        warn_if_sinc_regime(c);
        cviqp::OutcomeDistribution exact =
            cviqp::distribution(c, exp_grid.resolve(c));
        std::cerr << "total mass " << cviqp::format_g17(exact.total_mass)
                  << "; normalizing\n";
        exact = cviqp::normalize(exact);
        const cviqp::OutcomeDistribution approx = cviqp::perturb(exact, exp_eps, exp_seed);
        j = markov_json(cviqp::markov_check(exact, approx, exp_eps, exp_markov_delta));
      }
      emit_json(j, exp_out);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const cviqp::BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const cviqp::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const cviqp::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
