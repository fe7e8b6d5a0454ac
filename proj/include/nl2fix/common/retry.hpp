// Copyright 2026 The nl2fix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "nl2fix/common/errors.hpp"

namespace nl2fix {

// A failed provider call. Transient errors (rate limits, timeouts, 5xx)
// are retried; permanent ones are not.
class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& message, bool transient = true)
      : Error("ProviderError", message), transient_(transient) {}
  bool transient() const noexcept { return transient_; }

 private:
  bool transient_;
};

class ProviderExhausted : public Error {
 public:
  ProviderExhausted(const std::string& last_error, int attempts)
      : Error("ProviderExhausted", "provider gave up after " +
                                       std::to_string(attempts) +
                                       " attempt(s): " + last_error),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

struct RetryPolicy {
  int max_attempts = 5;
  double base_delay_s = 1.0;
  double factor = 2.0;
  // Each delay is scaled by a uniform factor in [1 - jitter, 1 + jitter].
  double jitter = 0.25;
  // Replaceable so tests need not wait.
  std::function<void(double)> sleep = [](double seconds) {
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
};

// Un-jittered delay before retry number `retry` (1-based).
inline double backoff_delay(const RetryPolicy& policy, int retry) {
  double d = policy.base_delay_s;
  for (int i = 1; i < retry; ++i) d *= policy.factor;
  return d;
}

// Calls `call` until it returns without a transient ProviderError or the
// attempt budget is spent. The number of calls made is stored in *attempts.
template <typename F>
auto with_retry(const RetryPolicy& policy, F&& call, int* attempts = nullptr)
    -> decltype(call()) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  for (int attempt = 1;; ++attempt) {
    if (attempts) *attempts = attempt;
    try {
      return call();
    } catch (const ProviderError& e) {
      if (!e.transient() || attempt >= policy.max_attempts) {
        throw ProviderExhausted(e.what(), attempt);
      }
      double delay = backoff_delay(policy, attempt);
      if (policy.jitter > 0) {
        std::uniform_real_distribution<double> u(1.0 - policy.jitter, 1.0 + policy.jitter);
        delay *= u(rng);
      }
      if (policy.sleep) policy.sleep(delay);
    }
  }
}

}  // namespace nl2fix
