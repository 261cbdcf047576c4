// Acceptance suite: one pass/fail line per criterion. Exits with the number
// of failed criteria. argv[1] is the CLI binary path (for the determinism
// criterion); when omitted the CLI checks are skipped with a failure.

#include <cstdio>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acceptance {

struct Criterion {
  std::string name;
  std::function<void(std::string&)> run;  // throws on failure; may append details
};

std::vector<Criterion>& registry() {
  static std::vector<Criterion> r;
  return r;
}

void add(const std::string& name, std::function<void(std::string&)> run) {
  registry().push_back({name, std::move(run)});
}

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string cli_path;  // set from argv

}  // namespace acceptance

void register_criteria();  // defined in acceptance_criteria.cpp

int main(int argc, char** argv) {
  if (argc > 1) acceptance::cli_path = argv[1];
  register_criteria();
  int failures = 0;
  for (const auto& criterion : acceptance::registry()) {
    std::string details;
    bool ok = true;
    std::string reason;
    try {
      criterion.run(details);
    } catch (const std::exception& e) {
      ok = false;
      reason = e.what();
    }
    if (ok) {
      std::printf("[PASS] %s%s%s\n", criterion.name.c_str(), details.empty() ? "" : " -- ",
                  details.c_str());
    } else {
      ++failures;
      std::printf("[FAIL] %s -- %s\n", criterion.name.c_str(), reason.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", acceptance::registry().size(), failures);
  return failures;
}
