#ifndef CVAUDIT_STATS_TABLE_HPP
#define CVAUDIT_STATS_TABLE_HPP

#include <string>
#include <vector>

#include "cvaudit/corpus.hpp"
#include "cvaudit/store.hpp"

namespace cvaudit::stats {

// Column-oriented analysis table: one row per scored observation with the
// vacancy covariates joined in. Complete cases only (missing scores are
// excluded listwise).
struct Table {
    std::vector<std::string> trial_id;
    std::vector<std::string> vacancy_id;
    std::vector<int> cluster;  // dense vacancy index, the cluster id
    std::vector<Ethnicity> ethnicity;
    std::vector<Gender> gender;
    std::vector<std::string> first, last;
    std::vector<double> temperature;
    std::vector<double> score;
    std::vector<std::string> occupation;
    std::vector<Experience> experience;
    std::vector<JobType> job_type;
    std::vector<ShiftSystem> shift;
    std::vector<Hours> hours;
    std::vector<Proficiency> lang_dutch, lang_french, lang_english;
    std::vector<std::string> location;

    size_t n() const { return score.size(); }
};

Table build_table(const std::vector<Observation>& observations, const Corpus& corpus);

}  // namespace cvaudit::stats

#endif
