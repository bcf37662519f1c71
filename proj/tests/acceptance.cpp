#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hkl2/report.hpp"
#include "hkl2/suites.hpp"

// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.

using namespace hkl2;
using report::Record;

namespace {

using Clock = std::chrono::steady_clock;

struct Timed {
  std::vector<Record> records;
  double seconds = 0.0;
};

Timed timed_suite(const std::string& name, const suites::SuiteConfig& cfg) {
  const auto t0 = Clock::now();
  Timed t{suites::run_one(name, cfg), 0.0};
  t.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return t;
}

struct Selection {
  int count = 0;
  int failed = 0;
  std::string first_failure;
};

Selection select(const std::vector<Record>& rs, const std::function<bool(const Record&)>& keep) {
  Selection s;
  for (const auto& r : rs) {
    if (!keep(r)) continue;
    ++s.count;
    if (!r.pass && s.failed++ == 0) s.first_failure = r.check + " = " + format_double(r.measured);
  }
  return s;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

int failures = 0;

void line(int id, const std::string& what, const Selection& s, double seconds, double budget) {
  const bool ok = s.count > 0 && s.failed == 0 && seconds < budget;
  failures += ok ? 0 : 1;
  std::printf("%s %d %s: %d/%d checks, %.2f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              s.count - s.failed, s.count, seconds, budget,
              s.failed ? (", first failure " + s.first_failure).c_str() : "");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

} // namespace

int main() {
  const suites::SuiteConfig cfg;

  const Timed algebra = timed_suite("algebra", cfg);
  line(1, "so5 relations for k = 1, 2",
       select(algebra.records, [](const Record& r) { return starts_with(r.check, "so5_"); }), algebra.seconds, 10.0);
  line(2, "middle kernel for k = 1, 2",
       select(algebra.records, [](const Record& r) { return starts_with(r.check, "kernel_"); }), algebra.seconds,
       60.0);

  const auto everything = [](const Record&) { return true; };
  const Timed taubnut = timed_suite("taubnut", cfg);
  line(3, "Taub-NUT harmonic form, L2 norm and tail", select(taubnut.records, everything), taubnut.seconds, 600.0);
  const Timed bianchi = timed_suite("bianchi", cfg);
  line(4, "Bianchi IX L2 classification", select(bianchi.records, everything), bianchi.seconds, 600.0);
  const Timed quotient = timed_suite("quotient", cfg);
  line(5, "hyperkaehler quotients (Taub-NUT, Calabi n = 2)", select(quotient.records, everything), quotient.seconds,
       600.0);
  const Timed nahm = timed_suite("nahm", cfg);
  line(6, "Nahm residuals, gauge invariance and contraction identity", select(nahm.records, everything), nahm.seconds,
       600.0);

  // Determinism: the command-line driver twice with seed 7, compared byte for byte.
  const auto dir = std::filesystem::temp_directory_path() / "hkl2_acceptance";
  std::filesystem::create_directories(dir);
  const auto a = dir / "run_a.json", b = dir / "run_b.json";
  const auto t0 = Clock::now();
  const std::string cli = HKL2_CLI_PATH;
  const int sa = std::system((cli + " --suite all --seed 7 --out " + a.string() + " 2>/dev/null").c_str());
  const int sb = std::system((cli + " --suite all --seed 7 --out " + b.string() + " 2>/dev/null").c_str());
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count() / 2.0;
  const std::string ja = slurp(a), jb = slurp(b);
  Selection det;
  det.count = 3;
  auto fail = [&](const std::string& why) {
    if (det.failed++ == 0) det.first_failure = why;
  };
  if (sa != 0 || sb != 0) fail("exit status " + std::to_string(sa) + "/" + std::to_string(sb));
  if (ja.empty() || ja != jb) fail("reports differ");
  if (ja.find("\"schema\": 1") == std::string::npos) fail("schema missing");
  line(7, "byte-identical reports for run_suite all --seed 7", det, seconds, 600.0);

  return failures == 0 ? 0 : 1;
}
