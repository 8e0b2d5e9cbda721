/*
 * Copyright 2026 The SeeSay Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include "golden_requests.hpp"

namespace {

TEST(GoldenRequests, PayloadsMatchFrozenFiles) {
  for (const auto& [name, payload] : golden::cases()) {
    const auto path = golden::directory() / name;
    if (golden::updating()) seesay::write_text_file(path, payload);
    ASSERT_TRUE(std::filesystem::exists(path)) << name << " missing; rerun with SEESAY_UPDATE_GOLDEN=1";
    EXPECT_EQ(seesay::read_text_file(path), payload) << name;
  }
}

TEST(GoldenRequests, PayloadsAreStableAcrossCalls) {
  const auto a = golden::cases();
  const auto b = golden::cases();
  EXPECT_EQ(a, b);
}

}  // namespace
