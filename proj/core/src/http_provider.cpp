#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "cvaudit/provider.hpp"

using nlohmann::json;

namespace cvaudit {

namespace {

struct ParsedUrl {
    std::string host_port;  // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw FatalProviderError("endpoint URL missing scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Chat-completion wire format: request {model, temperature, messages:[...]},
// response parsed from the first choice's message content. Each trial is an
// isolated request with no conversation history.
class HttpProvider final : public Provider {
public:
    explicit HttpProvider(const ProviderConfig& config)
        : config_(config), url_(parse_url(config.endpoint)) {
        if (!config.api_key_env.empty()) {
            const char* key = std::getenv(config.api_key_env.c_str());
            if (!key || !*key)
                throw FatalProviderError("environment variable '" + config.api_key_env +
                                         "' is not set (API credential)");
            api_key_ = key;
        }
    }

    RawResponse score_trial(const PromptText& prompt, const Trial& trial, int) override {
        json body{{"model", config_.model_id},
                  {"temperature", trial.temperature},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt.rendered}}})}};

        httplib::Client client(url_.host_port);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
        if (!config_.tls_verify) client.enable_server_certificate_verification(false);
#endif
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

        const auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post(url_.path, headers, body.dump(), "application/json");
        const auto t1 = std::chrono::steady_clock::now();
        const double latency = std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (!res) throw TransportError("connection to " + url_.host_port + " failed");
        if (res->status == 401 || res->status == 403)
            throw FatalProviderError("authentication rejected (HTTP " + std::to_string(res->status) + ")");
        if (res->status == 429 || res->status >= 500)
            throw TransportError("HTTP " + std::to_string(res->status) + " from provider");
        if (res->status != 200)
            throw FatalProviderError("unexpected HTTP " + std::to_string(res->status) + ": " + res->body);

        try {
            const json j = json::parse(res->body);
            return {j.at("choices").at(0).at("message").at("content").get<std::string>(), latency};
        } catch (const json::exception& e) {
            throw TransportError(std::string("malformed provider response: ") + e.what());
        }
    }

    std::string model_id() const override { return config_.model_id; }

private:
    ProviderConfig config_;
    ParsedUrl url_;
    std::string api_key_;
};

}  // namespace

std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config) {
    return std::make_unique<HttpProvider>(config);
}

}  // namespace cvaudit
