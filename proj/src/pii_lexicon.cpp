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

#include <algorithm>
#include <string_view>

#include "x402guard/pii_engine.hpp"

namespace x402guard::lexicon {

namespace {

// Common given names, lowercase, sorted. Names that double as ordinary
// English words (will, grace, mark, ...) are left out on purpose: the
// PERSON heuristics gate on this list and those words would make every
// sentence-initial bigram a candidate.
constexpr std::string_view kFirstNames[] = {
    "aaron",     "abigail",   "adam",      "adrian",    "aisha",     "alan",
    "albert",    "alejandro", "alex",      "alexander", "alexandra", "alice",
    "alicia",    "amanda",    "amelia",    "amy",       "ana",       "andrea",
    "andrew",    "angela",    "anita",     "anna",      "anne",      "anthony",
    "antonio",   "ariana",    "arthur",    "ashley",    "barbara",   "benjamin",
    "beth",      "betty",     "beverly",   "bonnie",    "bradley",   "brandon",
    "brenda",    "brian",     "brittany",  "bruce",     "bryan",     "caleb",
    "cameron",   "carl",      "carla",     "carlos",    "carmen",    "carol",
    "caroline",  "catherine", "cheryl",    "chloe",     "chris",     "christian",
    "christina", "christine", "christopher", "cindy",   "claire",    "clara",
    "colin",     "connor",    "craig",     "cynthia",   "daniel",    "daniela",
    "danielle",  "david",     "deborah",   "denise",    "dennis",    "derek",
    "diana",     "diane",     "diego",     "dmitri",    "donald",    "donna",
    "dorothy",   "douglas",   "dylan",     "edward",    "elaine",    "eleanor",
    "elena",     "elizabeth", "ella",      "emily",     "emma",      "eric",
    "erica",     "erik",      "ethan",     "eugene",    "evelyn",    "fatima",
    "felipe",    "fernando",  "fiona",     "frances",   "francisco", "gabriel",
    "gabriela",  "gary",      "george",    "gerald",    "gloria",    "gregory",
    "hannah",    "harold",    "harry",     "heidi",     "helen",     "henry",
    "hiroshi",   "howard",    "ian",       "ingrid",    "irene",     "isaac",
    "isabel",    "isabella",  "ivan",      "jacob",     "james",     "jamie",
    "jane",      "janet",     "janice",    "jason",     "javier",    "jean",
    "jeffrey",   "jennifer",  "jeremy",    "jessica",   "joan",      "joanna",
    "joel",      "johan",     "john",      "jonathan",  "jordan",    "jorge",
    "jose",      "joseph",    "joshua",    "joyce",     "juan",      "judith",
    "julia",     "julie",     "justin",    "karen",     "katherine", "kathleen",
    "kathryn",   "keith",     "kelly",     "kenneth",   "kevin",     "kimberly",
    "kyle",      "larry",     "lars",      "laura",     "lauren",    "lawrence",
    "leah",      "leon",      "leonardo",  "liam",      "linda",     "lisa",
    "logan",     "louis",     "lucas",     "lucia",     "luis",      "luke",
    "madison",   "manuel",    "marcus",    "margaret",  "maria",     "marie",
    "marilyn",   "mario",     "martha",    "martin",    "mary",      "matthew",
    "megan",     "mei",       "melissa",   "michael",   "michelle",  "miguel",
    "mohammed",  "monica",    "nancy",     "natalie",   "nathan",    "nicholas",
    "nicole",    "nina",      "noah",      "nora",      "oliver",    "olivia",
    "omar",      "oscar",     "pamela",    "patricia",  "patrick",   "paul",
    "paula",     "pedro",     "peter",     "philip",    "priya",     "rachel",
    "ralph",     "raymond",   "rebecca",   "ricardo",   "richard",   "robert",
    "roberto",   "roger",     "ronald",    "rosa",      "ruth",      "ryan",
    "samantha",  "samuel",    "sandra",    "sara",      "sarah",     "scott",
    "sean",      "sergei",    "sharon",    "shirley",   "simon",     "sofia",
    "sophia",    "sophie",    "stephanie", "stephen",   "steven",    "susan",
    "tanya",     "teresa",    "theodore",  "thomas",    "timothy",   "tina",
    "todd",      "tyler",     "valerie",   "vanessa",   "victor",    "victoria",
    "vincent",   "virginia",  "walter",    "wayne",     "wei",       "wendy",
    "william",   "yuki",      "yusuf",     "zachary",   "zoe",
};

}  // namespace

bool is_first_name(std::string_view lowercase_token) {
  return std::binary_search(std::begin(kFirstNames), std::end(kFirstNames), lowercase_token);
}

}  // namespace x402guard::lexicon
