#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qraman/config.hpp"
#include "qraman/run.hpp"
#include "qraman/selftest.hpp"

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("QRAMAN_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(n);
    std::cerr << "qraman: ignoring malformed QRAMAN_THREADS='" << env << "'\n";
  }
  return 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qraman::Error("cannot read config " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct RunFlags {
  std::string config;
  std::string out;
  bool normalize = false;
  std::string format;
  unsigned threads = default_threads();
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides output.directory)");
  cmd->add_flag("--normalize", f.normalize, "divide each grid by its max |value|");
  cmd->add_option("--format", f.format, "data file format")
      ->check(CLI::IsMember({"text", "binary"}));
  cmd->add_option("--threads", f.threads,
                  "worker threads, 0 = all cores (default: $QRAMAN_THREADS or 1)");
}

int execute(const std::string& kind, const RunFlags& f) {
  auto cfg = qraman::parse_config(slurp(f.config), kind);
  if (!f.out.empty()) cfg.output.directory = f.out;
  if (f.normalize) cfg.output.normalize = true;
  if (f.format == "text") cfg.output.format = qraman::OutputFormat::text;
  if (f.format == "binary") cfg.output.format = qraman::OutputFormat::binary;
  for (const auto& p : qraman::run(cfg, f.threads)) std::cout << p.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entangled-photon Raman signal simulator"};
  app.set_version_flag("--version", QRAMAN_VERSION);
  app.require_subcommand(1);

  RunFlags flags;
  std::string chosen;
  for (const char* kind : {"fastcars", "qfrs-intensity", "qfrs-heterodyne", "compare-probes"}) {
    auto* cmd = app.add_subcommand(kind, std::string("scan a ") + kind + " grid");
    add_run_flags(cmd, flags);
    cmd->callback([&chosen, kind] { chosen = kind; });
  }
  app.get_subcommand("compare-probes")
      ->description("scan entangled, classical and Fock probes on one grid");
  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
  selftest->callback([&chosen] { chosen = "selftest"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (chosen == "selftest")
      return qraman::print_selftest(qraman::run_selftest(), std::cout) ? 0 : 1;
    return execute(chosen, flags);
  } catch (const qraman::SchemaError& e) {
    std::cerr << "qraman: config error at " << e.what() << '\n';
    return 2;
  } catch (const qraman::ValidationError& e) {
    std::cerr << "qraman: invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qraman: " << e.what() << '\n';
    return 1;
  }
}
