// vora-filter: evaluate camera Vora-Values and design colorimetric prefilters.

#include "vora/commands.hpp"
#include "vora/error.hpp"
#include "vora/filter_calculus.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

namespace {

struct CommonFlags {
  std::string camera;
  std::string observer;
  std::string grid = "400:10:31";
  bool json = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--camera", flags.camera, "camera sensitivity CSV (wavelength,c1,c2,c3)")->required();
  cmd->add_option("--observer", flags.observer,
                  "observer CSV; defaults to $VORA_FILTER_DATA/cie1931_2deg_5nm.csv");
  cmd->add_option("--grid", flags.grid, "wavelength grid start:step:count")->capture_default_str();
  cmd->add_flag("--json", flags.json, "emit one JSON line instead of text");
}

vora::cli::InputPaths to_inputs(const CommonFlags& flags) {
  return {flags.camera, flags.observer, vora::WavelengthGrid::parse(flags.grid)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vora-Value evaluation and colorimetric filter design"};
  app.require_subcommand(1);

  CommonFlags eval_flags;
  std::string eval_filter;
  auto* evaluate = app.add_subcommand("evaluate", "print the native and filtered Vora-Value");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--filter", eval_filter, "filter CSV (wavelength,transmittance)");

  CommonFlags opt_flags;
  std::string method = "grad";
  std::string basis;
  std::string init = "ones";
  std::string init_filter;
  std::string out_filter;
  std::string out_trace;
  std::string out_svg;
  std::string emit_coeffs;
  vora::OptimizerConfig config;
  auto* optimize = app.add_subcommand("optimize", "design a filter maximizing the filtered Vora-Value");
  add_common(optimize, opt_flags);
  optimize->add_option("--method", method, "grad or newton")->capture_default_str();
  optimize->add_option("--alpha", config.alpha, "regularizer weight")->capture_default_str();
  optimize->add_option("--basis", basis, "smooth basis kind:k (cosine, gaussian, identity)");
  optimize->add_option("--init", init, "ones or random")->capture_default_str();
  optimize->add_option("--filter", init_filter, "initial filter CSV (overrides --init)");
  optimize->add_option("--seed", config.seed, "seed for random initialization")->capture_default_str();
  optimize->add_option("--max-iters", config.max_iters)->capture_default_str();
  optimize->add_option("--tol-obj", config.tol_obj)->capture_default_str();
  optimize->add_option("--tol-grad", config.tol_grad)->capture_default_str();
  optimize->add_option("--tau-min", config.tau_min)->capture_default_str();
  optimize->add_option("--tau-max", config.tau_max)->capture_default_str();
  optimize->add_option("--out-filter", out_filter, "write the final filter CSV");
  optimize->add_option("--out-trace", out_trace, "write the per-iteration trace CSV");
  optimize->add_option("--out-svg", out_svg, "write an SVG plot of the filter and the trace");
  optimize->add_option("--emit-coeffs", emit_coeffs, "write basis coefficients CSV (needs --basis)");

  CommonFlags check_flags;
  vora::cli::CheckOptions check_options;
  auto* check = app.add_subcommand("check", "verify the analytic derivatives on random filters");
  add_common(check, check_flags);
  check->add_option("--seed", check_options.seed)->capture_default_str();
  check->add_option("--trials", check_options.trials)->capture_default_str();
  check->add_flag("--sabotage", check_options.sabotage, "negative control: corrupt the gradient")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vora::cli::kExitInput;
  }

  try {
    if (evaluate->parsed()) {
      vora::cli::EvaluateOptions options{to_inputs(eval_flags), std::nullopt, eval_flags.json};
      if (!eval_filter.empty()) options.filter = eval_filter;
      return vora::cli::cmd_evaluate(options, std::cout, std::cerr);
    }
    if (optimize->parsed()) {
      vora::cli::OptimizeOptions options;
      options.inputs = to_inputs(opt_flags);
      options.json = opt_flags.json;
      config.method = vora::parse_method(method);
      if (init == "random") {
        config.init = vora::InitKind::Random;
      } else if (init != "ones") {
        throw vora::VoraError(vora::ErrorCode::InvalidConfig, "--init must be 'ones' or 'random'");
      }
      if (!basis.empty()) {
        const vora::BasisSet parsed = vora::parse_basis_spec(basis, options.inputs.grid);
        config.basis = vora::BasisSpec{parsed.kind, static_cast<int>(parsed.dimension())};
      }
      options.config = config;
      if (!init_filter.empty()) options.initial_filter = init_filter;
      if (!out_filter.empty()) options.out_filter = out_filter;
      if (!out_trace.empty()) options.out_trace = out_trace;
      if (!out_svg.empty()) options.out_svg = out_svg;
      if (!emit_coeffs.empty()) options.emit_coeffs = emit_coeffs;
      return vora::cli::cmd_optimize(options, std::cout, std::cerr);
    }
    check_options.inputs = to_inputs(check_flags);
    check_options.json = check_flags.json;
    return vora::cli::cmd_check(check_options, std::cout, std::cerr);
  } catch (const vora::VoraError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vora::cli::kExitInput;
  }
}
