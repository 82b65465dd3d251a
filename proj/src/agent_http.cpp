// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <regex>
#include <sstream>

#include "skyground/agent.hpp"
#include "skyground/error.hpp"

// must follow the Eigen includes; a system header pulled in by httplib breaks Eigen otherwise
#include "httplib.h"
#include "json.hpp"

namespace skyground::agent {
namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_url(const std::string& url) {
    static const std::regex kUrl(R"(^(http://[^/?#]+)([^#]*)$)");
    std::smatch m;
    if (!std::regex_match(url, m, kUrl)) {
        throw Error(Errc::InvalidArgument, "unsupported backend URL '" + url + "' (expected http://host[:port]/path)");
    }
    std::string path = m.str(2);
    return {m.str(1), path.empty() ? "/" : path};
}

void configure(httplib::Client& cli, const HttpOptions& options) {
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read image " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

HttpBackend::HttpBackend(std::string url, std::set<Capability> caps, HttpOptions options)
    : url_(std::move(url)), caps_(std::move(caps)), options_(options) {
    split_url(url_);
    if (options_.retries < 0) throw Error(Errc::InvalidArgument, "retries must be >= 0");
}

std::string HttpBackend::invoke(const std::string& prompt, const std::optional<std::string>& image) {
    const Endpoint ep = split_url(url_);
    nlohmann::json body = {{"prompt", prompt}};
    if (!image) {
        body["image"] = nullptr;
    } else if (options_.embed_image) {
        body["image"] = httplib::detail::base64_encode(read_file(*image));
    } else {
        body["image"] = *image;
    }

    httplib::Client cli(ep.base);
    configure(cli, options_);
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        auto res = cli.Post(ep.path, body.dump(), "application/json");
        if (res && res->status == 200) return res->body;
        last_error = res ? "HTTP status " + std::to_string(res->status) : httplib::to_string(res.error());
    }
    throw Error(Errc::IoError, "backend " + url_ + " failed: " + last_error);
}

HttpSearch::HttpSearch(std::string url, HttpOptions options) : url_(std::move(url)), options_(options) {
    split_url(url_);
}

std::string HttpSearch::invoke(const std::string& prompt, const std::optional<std::string>&) {
    const Endpoint ep = split_url(url_);
    const std::string sep = ep.path.find('?') == std::string::npos ? "?" : "&";
    const std::string target = ep.path + sep + "q=" + httplib::detail::encode_query_param(prompt);
    httplib::Client cli(ep.base);
    configure(cli, options_);
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        auto res = cli.Get(target);
        if (res && res->status == 200) return res->body;
        last_error = res ? "HTTP status " + std::to_string(res->status) : httplib::to_string(res.error());
    }
    throw Error(Errc::IoError, "search " + url_ + " failed: " + last_error);
}

}  // namespace skyground::agent
