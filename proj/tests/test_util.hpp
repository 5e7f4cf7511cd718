#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>

// Minimal check macros: count failures, print the first line that went
// wrong, keep running so one bad case does not hide the rest.

namespace testutil {
inline int checks = 0;
inline int failures = 0;

inline int summary(const char* name) {
  std::printf("%s: %d checks, %d failures\n", name, checks, failures);
  return failures == 0 ? 0 : 1;
}
}  // namespace testutil

#define REQUIRE(cond)                                                       \
  do {                                                                      \
    ++testutil::checks;                                                     \
    if (!(cond)) {                                                          \
      ++testutil::failures;                                                 \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);           \
    }                                                                       \
  } while (0)

#define REQUIRE_NEAR(a, b, tol)                                             \
  do {                                                                      \
    ++testutil::checks;                                                     \
    const double va_ = (a);                                                 \
    const double vb_ = (b);                                                 \
    if (!(std::fabs(va_ - vb_) <= (tol))) {                                 \
      ++testutil::failures;                                                 \
      std::printf("FAIL %s:%d: |%s - %s| = %.3e > %.3e  (%.12g vs %.12g)\n", \
                  __FILE__, __LINE__, #a, #b, std::fabs(va_ - vb_),         \
                  double(tol), va_, vb_);                                   \
    }                                                                       \
  } while (0)

#define REQUIRE_THROWS(expr)                                                \
  do {                                                                      \
    ++testutil::checks;                                                     \
    bool threw_ = false;                                                    \
    try {                                                                   \
      (void)(expr);                                                         \
    } catch (...) {                                                         \
      threw_ = true;                                                        \
    }                                                                       \
    if (!threw_) {                                                          \
      ++testutil::failures;                                                 \
      std::printf("FAIL %s:%d: expected throw: %s\n", __FILE__, __LINE__,   \
                  #expr);                                                   \
    }                                                                       \
  } while (0)

#define TEST_MAIN(name)                                                    \
  int main() {                                                             \
    run_all();                                                              \
    return testutil::summary(name);                                        \
  }
