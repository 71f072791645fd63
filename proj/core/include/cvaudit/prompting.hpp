#ifndef CVAUDIT_PROMPTING_HPP
#define CVAUDIT_PROMPTING_HPP

#include <string>
#include <string_view>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/design.hpp"

namespace cvaudit {

// English rendering of the screening instruction; configurable so the
// audit can run in other languages.
const std::string& default_instruction();

// Phrases that mark a safeguard refusal. Matched case-insensitively as
// substrings of the raw response.
const std::vector<std::string>& default_refusal_lexicon();

struct PromptText {
    std::string instruction;
    std::string vacancy_body;
    std::string cv_body_with_name;
    std::string rendered;
    std::string digest;
};

// Renders the full prompt for a trial. Two renders for the same vacancy
// that differ only in the trial name produce texts whose diff is exactly
// the name substring.
PromptText render_prompt(const Trial& trial, const Vacancy& vacancy, const CvTemplate& cv,
                         const std::string& instruction = default_instruction());

enum class ParseErrorKind { NoInteger, OutOfRange, Ambiguous, Refusal };

struct ScoreParseOutcome {
    bool ok = false;
    int score = 0;                                      // valid iff ok
    ParseErrorKind error = ParseErrorKind::NoInteger;   // valid iff !ok
    std::string diagnostic;

    static ScoreParseOutcome success(int s) { return {true, s, ParseErrorKind::NoInteger, ""}; }
    static ScoreParseOutcome failure(ParseErrorKind k, std::string diag) {
        return {false, 0, k, std::move(diag)};
    }
};

std::string_view to_string(ParseErrorKind k);

// Extraction grammar: tokenize integer literals (digit runs that are not
// part of a decimal number); drop denominators (a token directly preceded
// by '/' or by the words "out of"); if exactly one distinct value remains
// and it lies in [1,100] it is the score; one out-of-range value ->
// OutOfRange; zero values -> Refusal if a lexicon phrase matches, else
// NoInteger; several distinct values -> Ambiguous. Pure function; never
// throws.
ScoreParseOutcome parse_score(std::string_view raw,
                              const std::vector<std::string>& refusal_lexicon =
                                  default_refusal_lexicon());

}  // namespace cvaudit

#endif
