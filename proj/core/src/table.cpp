#include "cvaudit/stats/table.hpp"

#include <map>

namespace cvaudit::stats {

Table build_table(const std::vector<Observation>& observations, const Corpus& corpus) {
    std::map<std::string, const Vacancy*> vacancies;
    std::map<std::string, int> cluster_of;
    for (const auto& v : corpus.vacancies) {
        vacancies[v.id] = &v;
        cluster_of.emplace(v.id, static_cast<int>(cluster_of.size()));
    }

    Table t;
    for (const auto& o : observations) {
        if (!o.score) continue;  // complete-case analysis
        auto it = vacancies.find(o.vacancy_id);
        if (it == vacancies.end())
            throw ValidationError("observation '" + o.trial_id + "' references unknown vacancy '" +
                                  o.vacancy_id + "'");
        const Vacancy& v = *it->second;
        t.trial_id.push_back(o.trial_id);
        t.vacancy_id.push_back(o.vacancy_id);
        t.cluster.push_back(cluster_of.at(o.vacancy_id));
        t.ethnicity.push_back(o.ethnicity);
        t.gender.push_back(o.gender);
        t.first.push_back(o.first);
        t.last.push_back(o.last);
        t.temperature.push_back(o.temperature);
        t.score.push_back(static_cast<double>(*o.score));
        t.occupation.push_back(v.occupation);
        t.experience.push_back(v.experience_req);
        t.job_type.push_back(v.job_type);
        t.shift.push_back(v.shift);
        t.hours.push_back(v.hours);
        t.lang_dutch.push_back(v.lang(Language::Dutch));
        t.lang_french.push_back(v.lang(Language::French));
        t.lang_english.push_back(v.lang(Language::English));
        t.location.push_back(v.location);
    }
    return t;
}

}  // namespace cvaudit::stats
