// Copyright 2026 The Holefill Authors.
//
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

// Inputs behind the checked-in prompt goldens.

#ifndef HOLEFILL_TESTS_PROMPT_FIXTURE_H_
#define HOLEFILL_TESTS_PROMPT_FIXTURE_H_

#include "holefill/prompting.h"

namespace holefill::testing {

constexpr char kQuery[] = "how long do tomato seeds take to germinate";
constexpr char kPassage[] =
    "Tomato seeds usually sprout within five to ten days when the soil stays "
    "warm, around 21 to 27 C. Cooler soil can stretch germination to two weeks "
    "or more.";

inline Example Ex(const char* query, const char* passage, int grade) {
  return {query, passage, RelevanceGrade::FromInt(grade)};
}

inline ExampleSet GoldenExamples() {
  constexpr char kCapital[] = "what is the capital of australia";
  constexpr char kVitamin[] = "symptoms of vitamin d deficiency";
  ExampleSet set;
  set.per_label_count = 2;
  set.examples = {
      Ex(kCapital, "Kangaroos are marsupials found across the Australian outback.", 0),
      Ex(kVitamin, "The stock market closed higher on Friday after a volatile week.", 0),
      Ex(kCapital,
         "Sydney is the largest city in Australia and home to its famous opera house.", 1),
      Ex(kVitamin, "Vitamin D is produced in the skin after exposure to sunlight.", 1),
      Ex(kCapital,
         "Many visitors to Australia tour the parliament building in Canberra, where "
         "the federal government sits, before heading to the coast.",
         2),
      Ex(kVitamin,
         "People low in several nutrients, including vitamin D, may feel tired; the "
         "article covers diet tips at length.",
         2),
      Ex(kCapital, "Canberra is the capital city of Australia.", 3),
      Ex(kVitamin,
         "Common symptoms of vitamin D deficiency include fatigue, bone pain, muscle "
         "weakness and mood changes.",
         3),
  };
  return set;
}

}  // namespace holefill::testing

#endif  // HOLEFILL_TESTS_PROMPT_FIXTURE_H_
