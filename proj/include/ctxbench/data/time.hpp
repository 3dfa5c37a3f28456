/*
 * Copyright 2026 The ctxbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ctxbench::data {

using TimePoint = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM", "YYYY-MM-DD HH:MM:SS" and an optional trailing "Z".
std::optional<TimePoint> parse_timestamp(std::string_view text);
std::optional<Date> parse_date(std::string_view text);

std::string format_timestamp(TimePoint t);  // "YYYY-MM-DDTHH:MM:SS"
std::string format_date(Date d);            // "YYYY-MM-DD"

Date date_of(TimePoint t);
int minute_of_day(TimePoint t);
// Monday = 0 ... Sunday = 6.
int day_of_week(TimePoint t);

inline TimePoint add_minutes(TimePoint t, long long minutes) {
  return t + std::chrono::minutes(minutes);
}

}  // namespace ctxbench::data
