#include <httplib.h>
#include <json.hpp>

#include "align/corpus.hpp"

namespace align {

HttpTranscriber::HttpTranscriber(std::string url, double timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0) {
        throw ConfigError("transcriber url must start with http:// : " + url);
    }
    std::string rest = url.substr(prefix.size());
    const std::size_t slash = rest.find('/');
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    const std::size_t colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
        port_ = 80;
    } else {
        host_ = hostport.substr(0, colon);
        try {
            port_ = std::stoi(hostport.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("transcriber url has an invalid port: " + url);
        }
    }
    if (host_.empty()) {
        throw ConfigError("transcriber url has an empty host: " + url);
    }
}

Transcript HttpTranscriber::transcribe(const std::string& audio_ref, Language language) {
    httplib::Client client(host_, port_);
    const auto seconds = static_cast<time_t>(timeout_seconds_);
    const auto micros =
        static_cast<time_t>((timeout_seconds_ - static_cast<double>(seconds)) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    nlohmann::json request;
    request["audio_ref"] = audio_ref;
    request["language"] = std::string(language_name(language));

    httplib::Result response = client.Post(path_, request.dump(), "application/json");
    if (!response) {
        throw RetryableError("transcriber unreachable: " + httplib::to_string(response.error()));
    }
    if (response->status != 200) {
        throw RetryableError("transcriber returned status " + std::to_string(response->status));
    }
    try {
        const nlohmann::json doc = nlohmann::json::parse(response->body);
        return Transcript::normalize(doc.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw RetryableError("transcriber response malformed: " + std::string(e.what()));
    }
}

}  // namespace align
