#include "cvaudit/common.hpp"

namespace cvaudit {

namespace {

template <typename E, size_t N>
std::optional<E> parse_from(const std::array<E, N>& all, std::string_view s) {
    for (E v : all) {
        if (to_string(v) == s) return v;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Ethnicity e) {
    switch (e) {
        case Ethnicity::Arab: return "Arab";
        case Ethnicity::Asian: return "Asian";
        case Ethnicity::BlackAmerican: return "BlackAmerican";
        case Ethnicity::CentralAfrican: return "CentralAfrican";
        case Ethnicity::Dutch: return "Dutch";
        case Ethnicity::EasternEuropean: return "EasternEuropean";
        case Ethnicity::Hispanic: return "Hispanic";
        case Ethnicity::Turkish: return "Turkish";
        case Ethnicity::WhiteAmerican: return "WhiteAmerican";
    }
    return "?";
}

std::string_view to_string(Gender g) {
    return g == Gender::Female ? "female" : "male";
}

std::string_view to_string(Experience e) {
    switch (e) {
        case Experience::None: return "none";
        case Experience::TwoYears: return "2y";
        case Experience::FiveYears: return "5y";
    }
    return "?";
}

std::string_view to_string(JobType j) {
    switch (j) {
        case JobType::Permanent: return "permanent";
        case JobType::Temporary: return "temporary";
        case JobType::Other: return "other";
    }
    return "?";
}

std::string_view to_string(ShiftSystem s) {
    switch (s) {
        case ShiftSystem::Day: return "day";
        case ShiftSystem::TwoShift: return "two_shift";
        case ShiftSystem::ThreeShift: return "three_shift";
        case ShiftSystem::Night: return "night";
        case ShiftSystem::Interrupted: return "interrupted";
        case ShiftSystem::Continuous: return "continuous";
    }
    return "?";
}

std::string_view to_string(Hours h) {
    return h == Hours::FullTime ? "full_time" : "part_time";
}

std::string_view to_string(Language l) {
    switch (l) {
        case Language::Dutch: return "dutch";
        case Language::French: return "french";
        case Language::English: return "english";
    }
    return "?";
}

std::string_view to_string(Proficiency p) {
    switch (p) {
        case Proficiency::NotAtAll: return "not_at_all";
        case Proficiency::Limited: return "limited";
        case Proficiency::Moderate: return "moderate";
        case Proficiency::Good: return "good";
        case Proficiency::VeryGood: return "very_good";
    }
    return "?";
}

std::optional<Ethnicity> parse_ethnicity(std::string_view s) { return parse_from(kAllEthnicities, s); }
std::optional<Gender> parse_gender(std::string_view s) { return parse_from(kAllGenders, s); }
std::optional<Experience> parse_experience(std::string_view s) { return parse_from(kAllExperience, s); }
std::optional<JobType> parse_job_type(std::string_view s) { return parse_from(kAllJobTypes, s); }
std::optional<ShiftSystem> parse_shift(std::string_view s) { return parse_from(kAllShifts, s); }
std::optional<Hours> parse_hours(std::string_view s) { return parse_from(kAllHours, s); }
std::optional<Language> parse_language(std::string_view s) { return parse_from(kAllLanguages, s); }
std::optional<Proficiency> parse_proficiency(std::string_view s) { return parse_from(kAllProficiencies, s); }

}  // namespace cvaudit
