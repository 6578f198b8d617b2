#pragma once

#include <memory>
#include <string>

#include <httplib.h>

#include "quizgen/errors.hpp"

namespace quizgen::detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // always starts with '/', no trailing '/'
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("URL must include a scheme: " + url);
    auto path_begin = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_begin);
    out.path = path_begin == std::string::npos ? std::string{} : url.substr(path_begin);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

inline std::unique_ptr<httplib::Client> make_client(const std::string& origin, int timeout_s) {
    auto cli = std::make_unique<httplib::Client>(origin);
    if (!cli->is_valid()) throw Error("invalid endpoint: " + origin);
    cli->set_connection_timeout(timeout_s, 0);
    cli->set_read_timeout(timeout_s, 0);
    cli->set_write_timeout(timeout_s, 0);
    return cli;
}

}  // namespace quizgen::detail
