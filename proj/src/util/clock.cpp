// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "x402guard/util/clock.hpp"

#include <cstdio>
#include <ctime>

namespace x402guard {

std::string rfc3339_ms(TimePoint tp) {
  using namespace std::chrono;
  auto ms_total = duration_cast<milliseconds>(tp.time_since_epoch());
  std::time_t secs = static_cast<std::time_t>(ms_total.count() / 1000);
  int ms = static_cast<int>(ms_total.count() % 1000);
  if (ms < 0) {  // pre-epoch instants still format with a positive ms field
    ms += 1000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
  return buf;
}

}  // namespace x402guard
