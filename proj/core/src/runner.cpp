#include "cvaudit/runner.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <map>
#include <mutex>
#include <thread>

namespace cvaudit {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Shared token-bucket style limiter: spaces request starts by 1/rate.
class RateLimiter {
public:
    explicit RateLimiter(double per_second)
        : interval_(std::chrono::duration<double>(1.0 / per_second)) {}

    void acquire() {
        std::chrono::steady_clock::time_point wake;
        {
            std::lock_guard<std::mutex> lock(mu_);
            const auto now = std::chrono::steady_clock::now();
            next_ = std::max(next_, now);
            wake = next_;
            next_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
        }
        std::this_thread::sleep_until(wake);
    }

private:
    std::mutex mu_;
    std::chrono::duration<double> interval_;
    std::chrono::steady_clock::time_point next_{};
};

struct TrialResult {
    Observation obs;
    bool fatal = false;
    std::string fatal_message;
};

}  // namespace

RunStats execute_plan(const ExperimentPlan& plan, const Corpus& corpus,
                      const ProviderConfig& provider_config, RunLog& log,
                      const RunOptions& options) {
    provider_config.validate();
    auto provider = make_provider(provider_config, corpus);

    std::map<std::string, const Vacancy*> vacancies;
    std::map<std::string, const CvTemplate*> cvs;
    for (const auto& v : corpus.vacancies) vacancies[v.id] = &v;
    for (const auto& c : corpus.cvs) cvs[c.vacancy_id] = &c;

    std::vector<size_t> pending;
    RunStats stats;
    for (size_t i = 0; i < plan.trials.size(); ++i) {
        if (log.contains(plan.trials[i].trial_id))
            ++stats.skipped;
        else
            pending.push_back(i);
    }

    // Local providers have no transport to protect.
    const bool rate_limited = provider_config.kind == ProviderKind::Http;
    RateLimiter limiter(provider_config.rate_limit_per_s);
    std::atomic<size_t> cursor{0};
    std::atomic<bool> abort{false};
    std::string abort_message;

    // Single writer: results are released strictly in plan order so the
    // log bytes do not depend on worker scheduling.
    std::mutex results_mu;
    std::condition_variable results_cv;
    std::map<size_t, TrialResult> results;  // keyed by position in `pending`

    const std::string ts = utc_timestamp();

    auto worker = [&]() {
        while (!abort.load()) {
            const size_t slot = cursor.fetch_add(1);
            if (slot >= pending.size()) return;
            if (options.keep_running && !options.keep_running()) {
                abort.store(true);
                results_cv.notify_all();
                return;
            }
            const Trial& trial = plan.trials[pending[slot]];
            TrialResult result;

            Observation obs;
            obs.trial_id = trial.trial_id;
            obs.vacancy_id = trial.vacancy_id;
            obs.ethnicity = trial.ethnicity;
            obs.gender = trial.gender;
            obs.first = trial.name.first;
            obs.last = trial.name.last;
            obs.temperature = trial.temperature;
            obs.model_id = provider->model_id();
            obs.timestamp = ts;

            try {
                const Vacancy* vacancy = vacancies.at(trial.vacancy_id);
                const CvTemplate* cv = cvs.at(trial.vacancy_id);
                const PromptText prompt = render_prompt(trial, *vacancy, *cv, options.instruction);
                obs.prompt_digest = prompt.digest;

                std::string last_reason = "no attempt made";
                for (int attempt = 0; attempt < provider_config.retry.max_attempts; ++attempt) {
                    obs.attempt_count = attempt + 1;
                    if (attempt > 0) {
                        const int wait = provider_config.retry.backoff_for(attempt - 1);
                        if (wait > 0) std::this_thread::sleep_for(std::chrono::milliseconds(wait));
                    }
                    try {
                        if (rate_limited) limiter.acquire();
                        const RawResponse raw = provider->score_trial(prompt, trial, attempt);
                        obs.raw_response = raw.text;
                        const ScoreParseOutcome parsed =
                            parse_score(raw.text, options.refusal_lexicon);
                        if (parsed.ok) {
                            obs.score = parsed.score;
                            obs.missing_reason.reset();
                            break;
                        }
                        last_reason = std::string(to_string(parsed.error));
                        obs.missing_reason = last_reason;
                        if (parsed.error == ParseErrorKind::Refusal) break;  // retrying won't help
                    } catch (const TransportError& e) {
                        last_reason = std::string("transport: ") + e.what();
                        obs.missing_reason = last_reason;
                    }
                }
            } catch (const FatalProviderError& e) {
                result.fatal = true;
                result.fatal_message = e.what();
            } catch (const std::exception& e) {
                result.fatal = true;
                result.fatal_message = e.what();
            }

            result.obs = std::move(obs);
            {
                std::lock_guard<std::mutex> lock(results_mu);
                results.emplace(slot, std::move(result));
            }
            results_cv.notify_all();
        }
    };

    const int n_workers =
        static_cast<int>(std::min<size_t>(provider_config.max_in_flight, std::max<size_t>(pending.size(), 1)));
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);

    size_t next_to_write = 0;
    bool fatal_seen = false;
    {
        std::unique_lock<std::mutex> lock(results_mu);
        while (next_to_write < pending.size()) {
            results_cv.wait(lock,
                            [&] { return results.count(next_to_write) > 0 || abort.load(); });
            if (!results.count(next_to_write)) {
                // Aborted with a gap at next_to_write: the in-order prefix is
                // fully written; anything past the gap was never acknowledged
                // and will be re-executed on resume.
                break;
            }
            TrialResult result = std::move(results.at(next_to_write));
            results.erase(next_to_write);
            ++next_to_write;
            if (result.fatal) {
                fatal_seen = true;
                abort.store(true);
                abort_message = result.fatal_message;
                break;
            }
            lock.unlock();
            log.append(result.obs);
            ++stats.attempted;
            if (result.obs.score)
                ++stats.scored;
            else
                ++stats.failed;
            if (options.on_progress) options.on_progress(log.size(), plan.trials.size());
            lock.lock();
        }
        abort.store(true);
    }
    results_cv.notify_all();
    for (auto& t : threads) t.join();

    if (fatal_seen) throw FatalProviderError("run aborted: " + abort_message);
    return stats;
}

}  // namespace cvaudit
