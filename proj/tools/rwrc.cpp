#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "rwrc/config.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/experiments.hpp"
#include "rwrc/kernels.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  unsigned threads = 1;
  bool quiet = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "YAML manifest")->required();
  sub->add_option("--seed", o.seed, "override env.seed");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--quiet", o.quiet, "suppress progress lines");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biased random walk among heavy-tailed random conductances"};
  app.set_version_flag("--version", RWRC_VERSION);
  app.require_subcommand(1);
  Options opts;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "single walks: regeneration records, processes, trajectory dumps"},
      {"pair", "two walks per environment: intersections, joint levels, crossing sets"},
      {"scaling", "rescaled position and clock processes with fitted stable scale"},
      {"variance", "environment variance of a functional along geometric scales"},
      {"stats", "environment tail, stable sampler and appendix checks"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const rwrc::Pipeline p = rwrc::parse_pipeline(sub->get_name());
    rwrc::Manifest m = rwrc::load_manifest(opts.config);
    rwrc::apply_seed_override(m.env);
    if (opts.seed) m.env.seed = *opts.seed;
    rwrc::RunContext ctx;
    ctx.out_dir = opts.out;
    ctx.threads = opts.threads;
    ctx.progress = !opts.quiet;
    if (!opts.quiet) std::cerr << "kernels=" << rwrc::kernels().name << '\n';
    const auto files = rwrc::run_pipeline(p, m, ctx);
    for (const auto& f : files) std::cout << (ctx.out_dir / f).string() << '\n';
    return 0;
  } catch (const rwrc::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
