#ifndef CVAUDIT_COMMON_HPP
#define CVAUDIT_COMMON_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cvaudit {

// Raised when an input file or in-memory object violates its schema or an
// invariant. The message names the offending file/field/value.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by estimators on unusable inputs (rank deficiency, degenerate
// samples, non-convergence).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Ethnicity {
    Arab,
    Asian,
    BlackAmerican,
    CentralAfrican,
    Dutch,
    EasternEuropean,
    Hispanic,
    Turkish,
    WhiteAmerican,
};

enum class Gender { Female, Male };

enum class Experience { None, TwoYears, FiveYears };

enum class JobType { Permanent, Temporary, Other };

enum class ShiftSystem { Day, TwoShift, ThreeShift, Night, Interrupted, Continuous };

enum class Hours { FullTime, PartTime };

enum class Language { Dutch, French, English };

enum class Proficiency { NotAtAll, Limited, Moderate, Good, VeryGood };

inline constexpr std::array<Ethnicity, 9> kAllEthnicities = {
    Ethnicity::Arab,           Ethnicity::Asian,    Ethnicity::BlackAmerican,
    Ethnicity::CentralAfrican, Ethnicity::Dutch,    Ethnicity::EasternEuropean,
    Ethnicity::Hispanic,       Ethnicity::Turkish,  Ethnicity::WhiteAmerican,
};

inline constexpr std::array<Gender, 2> kAllGenders = {Gender::Female, Gender::Male};

inline constexpr std::array<Experience, 3> kAllExperience = {
    Experience::None, Experience::TwoYears, Experience::FiveYears};

inline constexpr std::array<JobType, 3> kAllJobTypes = {
    JobType::Permanent, JobType::Temporary, JobType::Other};

inline constexpr std::array<ShiftSystem, 6> kAllShifts = {
    ShiftSystem::Day,   ShiftSystem::TwoShift,    ShiftSystem::ThreeShift,
    ShiftSystem::Night, ShiftSystem::Interrupted, ShiftSystem::Continuous};

inline constexpr std::array<Hours, 2> kAllHours = {Hours::FullTime, Hours::PartTime};

inline constexpr std::array<Language, 3> kAllLanguages = {
    Language::Dutch, Language::French, Language::English};

inline constexpr std::array<Proficiency, 5> kAllProficiencies = {
    Proficiency::NotAtAll, Proficiency::Limited, Proficiency::Moderate,
    Proficiency::Good, Proficiency::VeryGood};

std::string_view to_string(Ethnicity e);
std::string_view to_string(Gender g);
std::string_view to_string(Experience e);
std::string_view to_string(JobType j);
std::string_view to_string(ShiftSystem s);
std::string_view to_string(Hours h);
std::string_view to_string(Language l);
std::string_view to_string(Proficiency p);

std::optional<Ethnicity> parse_ethnicity(std::string_view s);
std::optional<Gender> parse_gender(std::string_view s);
std::optional<Experience> parse_experience(std::string_view s);
std::optional<JobType> parse_job_type(std::string_view s);
std::optional<ShiftSystem> parse_shift(std::string_view s);
std::optional<Hours> parse_hours(std::string_view s);
std::optional<Language> parse_language(std::string_view s);
std::optional<Proficiency> parse_proficiency(std::string_view s);

}  // namespace cvaudit

#endif
