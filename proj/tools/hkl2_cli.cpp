#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hkl2/cohomogeneity_one.hpp"
#include "hkl2/gibbons_hawking.hpp"
#include "hkl2/nahm.hpp"
#include "hkl2/report.hpp"
#include "hkl2/suites.hpp"

using namespace hkl2;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os || !(os << text) || !os.flush()) throw Error("cannot write " + p.string());
}

/// Plot-ready tables: Taub-NUT radial density, Bianchi densities and a
/// two-pole Nahm solution.
void write_profiles(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream gh_csv;
  gh_csv << "r,potential,density,asymptotic\n";
  for (const auto& row : gh::radial_profile(gh::GHData::make(1.0), numeric::geomspace(1e-3, 1e4, 71)))
    gh_csv << format_double(row.r) << "," << format_double(row.potential) << "," << format_double(row.density) << ","
           << format_double(row.asymptotic) << "\n";
  write_file(dir / "taubnut_radial.csv", gh_csv.str());

  using namespace bianchi;
  const std::vector<std::pair<std::string, BianchiProfile>> profiles{
      {"atiyah_hitchin", atiyah_hitchin_model_profile()},
      {"eguchi_hanson", eguchi_hanson_profile(0.5)},
      {"taubnut", biaxial_taubnut_profile(1.0)}};
  for (const auto& [name, p] : profiles) {
    std::vector<double> rhos;
    for (double t : numeric::geomspace(1e-4, p.upper_infinite() ? 1e3 : 0.999 * (p.hi - p.lo), 61)) rhos.push_back(p.lo + t);
    std::ostringstream os;
    os << "rho,ratio1,ratio2,ratio3,F1,F2,F3,density1,density2,density3\n";
    for (const auto& r : density_profile(p, rhos)) {
      os << format_double(r.rho);
      for (double v : r.ratio) os << "," << format_double(v);
      for (double v : r.F) os << "," << format_double(v);
      for (double v : r.density) os << "," << format_double(v);
      os << "\n";
    }
    write_file(dir / ("bianchi_" + name + ".csv"), os.str());
  }

  std::ostringstream nahm_csv;
  nahm::write_csv(nahm_csv, nahm::two_pole_solution(0.5, 1e-2, 201));
  write_file(dir / "nahm_two_pole.csv", nahm_csv.str());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch verification of the hyperkaehler L2 toolkit"};
  app.set_config("--config", "", "TOML/INI file with option values");

  std::string suite = "all", out = "-", format = "json", profiles;
  suites::SuiteConfig cfg;
  bool no_two_pole = false;
  app.add_option("--suite", suite, "algebra, taubnut, bianchi, quotient, nahm or all")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for random sampling")->capture_default_str();
  app.add_option("--out", out, "report path, - for stdout")->capture_default_str();
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--tol-scale", cfg.tol_scale, "multiplier for upper-bound and closeness tolerances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--gh-points", cfg.gh_points, "random points in the Taub-NUT checks")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  app.add_option("--chart-points", cfg.chart_points, "chart samples for moment residuals")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  app.add_option("--fd-points", cfg.fd_points, "chart samples for finite-difference form checks")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  app.add_option("--nahm-nodes", cfg.nahm_nodes, "grid nodes for Nahm solutions (odd)")
      ->check(CLI::Range(101, 200001))
      ->capture_default_str();
  app.add_flag("--no-two-pole", no_two_pole, "skip the elliptic two-pole reference solutions");
  app.add_option("--profiles", profiles, "directory for plot-ready CSV tables");
  CLI11_PARSE(app, argc, argv);
  cfg.two_pole = !no_two_pole;
  if (cfg.nahm_nodes % 2 == 0) {
    std::cerr << "error: --nahm-nodes must be odd\n";
    return 2;
  }

  try {
    const auto names = suites::resolve(suite);
    const auto records = suites::run_suite(suite, cfg);
    std::ostringstream os;
    if (format == "json")
      report::write_json(os, records, {names, cfg.seed, cfg.tol_scale});
    else
      report::write_csv(os, records);
    if (out == "-")
      std::cout << os.str();
    else
      write_file(out, os.str());
    if (!profiles.empty()) write_profiles(profiles);

    std::size_t failed = 0;
    for (const auto& r : records)
      if (!r.pass) {
        ++failed;
        std::cerr << "FAIL " << r.suite << "/" << r.check << ": measured " << format_double(r.measured) << "\n";
      }
    std::cerr << records.size() - failed << "/" << records.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
