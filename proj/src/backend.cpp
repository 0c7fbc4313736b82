#include "chesscomm/backend.hpp"

#include <sys/socket.h>

#include <cmath>
#include <memory>

#include "httplib.h"
#include "json.hpp"

namespace chesscomm::backend {

using json = nlohmann::ordered_json;

Endpoint Endpoint::parse(std::string_view url) {
  Endpoint e;
  if (url.rfind("unix:", 0) == 0) {
    std::string_view rest = url.substr(5);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      e.prefix = std::string(rest.substr(hash + 1));
      rest = rest.substr(0, hash);
    }
    if (rest.empty()) throw Error("empty socket path in \"" + std::string(url) + "\"");
    e.host = std::string(rest);
    e.unix_socket = true;
    e.port = 80;
  } else {
    if (url.rfind("http://", 0) != 0)
      throw Error("unsupported backend url \"" + std::string(url) + "\" (http:// or unix: only)");
    std::string_view rest = url.substr(7);
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    if (slash != std::string_view::npos) e.prefix = std::string(rest.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
      const std::string port(authority.substr(colon + 1));
      char* end = nullptr;
      const long p = std::strtol(port.c_str(), &end, 10);
      if (port.empty() || *end != '\0' || p <= 0 || p > 65535)
        throw Error("bad port in \"" + std::string(url) + "\"");
      e.port = static_cast<int>(p);
      authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw Error("missing host in \"" + std::string(url) + "\"");
    e.host = std::string(authority);
  }
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  if (!e.prefix.empty() && e.prefix.front() != '/') e.prefix.insert(e.prefix.begin(), '/');
  return e;
}

std::string Endpoint::describe() const {
  if (unix_socket) return "unix:" + host + (prefix.empty() ? "" : "#" + prefix);
  return "http://" + host + ":" + std::to_string(port) + prefix;
}

// ---- payloads -----------------------------------------------------------

namespace {

json parse_object(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponse(std::string("response is not JSON: ") + e.what());
  } catch (const json::out_of_range& e) {
    // number overflow, e.g. 1e999
    throw NonFiniteScore(e.what());
  }
  if (!j.is_object()) throw MalformedResponse("response is not a JSON object");
  return j;
}

}  // namespace

std::string generate_request(std::string_view input, int max_tokens) {
  json j;
  j["input"] = std::string(input);
  j["max_tokens"] = max_tokens;
  return j.dump();
}

std::string parse_generate_response(std::string_view body) {
  const json j = parse_object(body);
  auto it = j.find("text");
  if (it == j.end() || !it->is_string()) throw MalformedResponse("response has no string \"text\"");
  return it->get<std::string>();
}

std::string score_request(std::string_view prompt, const std::vector<std::string>& continuations) {
  json j;
  j["prompt"] = std::string(prompt);
  j["continuations"] = continuations;
  return j.dump();
}

std::vector<double> parse_score_response(std::string_view body, std::size_t expected) {
  const json j = parse_object(body);
  auto it = j.find("logprobs");
  if (it == j.end() || !it->is_array()) throw MalformedResponse("response has no \"logprobs\" array");
  if (it->size() != expected)
    throw MalformedResponse("expected " + std::to_string(expected) + " logprobs, got " +
                            std::to_string(it->size()));
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (v.is_null()) throw NonFiniteScore("logprob " + std::to_string(i) + " is null");
    if (!v.is_number()) throw MalformedResponse("logprob " + std::to_string(i) + " is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw NonFiniteScore("logprob " + std::to_string(i) + " is not finite");
    out.push_back(d);
  }
  return out;
}

std::string classify_request(std::string_view task, std::string_view text) {
  json j;
  j["task"] = std::string(task);
  j["text"] = std::string(text);
  return j.dump();
}

tags::TextClassifier::Label parse_classify_response(std::string_view body) {
  const json j = parse_object(body);
  auto label = j.find("label");
  auto conf = j.find("confidence");
  if (label == j.end() || !label->is_string()) throw MalformedResponse("response has no string \"label\"");
  if (conf == j.end() || !conf->is_number()) throw MalformedResponse("response has no numeric \"confidence\"");
  const double c = conf->get<double>();
  if (!(c >= 0.0 && c <= 1.0)) throw MalformedResponse("confidence outside [0, 1]");
  return {label->get<std::string>(), c};
}

// ---- transport ----------------------------------------------------------

namespace {

std::unique_ptr<httplib::Client> make_client(const Endpoint& e, const HttpOptions& o) {
  auto c = std::make_unique<httplib::Client>(e.host, e.port);
  if (e.unix_socket) c->set_address_family(AF_UNIX);
  c->set_connection_timeout(o.connect_timeout);
  c->set_read_timeout(o.read_timeout);
  c->set_write_timeout(o.read_timeout);
  c->set_keep_alive(false);
  return c;
}

std::string post_once(const Endpoint& endpoint, std::string_view route, const std::string& body,
                      const HttpOptions& options) {
  auto client = make_client(endpoint, options);
  const std::string path = endpoint.prefix + std::string(route);
  const auto start = std::chrono::steady_clock::now();
  auto res = client->Post(path, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const std::string where = endpoint.describe() + std::string(route);
    if (err == httplib::Error::ConnectionTimeout ||
        ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= options.read_timeout))
      throw BackendTimeout("timed out waiting for " + where);
    if (err == httplib::Error::Connection)
      throw BackendUnreachable("cannot connect to " + where);
    throw BackendUnreachable(where + ": " + httplib::to_string(err));
  }
  if (res->status == 503)
    throw BackendUnreachable(endpoint.describe() + std::string(route) + " is not ready (503)");
  if (res->status != 200)
    throw MalformedResponse(endpoint.describe() + std::string(route) + " answered status " +
                            std::to_string(res->status));
  return res->body;
}

}  // namespace

std::string post_json(const Endpoint& endpoint, std::string_view route, const std::string& body,
                      const HttpOptions& options) {
  for (int attempt = 0;; ++attempt) {
    try {
      return post_once(endpoint, route, body, options);
    } catch (const BackendTimeout&) {
      if (attempt >= options.retries) throw;
    } catch (const BackendUnreachable&) {
      if (attempt >= options.retries) throw;
    }
  }
}

bool backend_ready(const Endpoint& endpoint, const HttpOptions& options) {
  try {
    auto client = make_client(endpoint, options);
    auto res = client->Get(endpoint.prefix + "/health");
    if (!res || res->status != 200) return false;
    const json j = json::parse(res->body);
    return j.is_object() && j.value("status", "") == "ready";
  } catch (...) {
    return false;
  }
}

HttpGenerationBackend::HttpGenerationBackend(Endpoint endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

std::string HttpGenerationBackend::generate(std::string_view input, int max_tokens) {
  return parse_generate_response(
      post_json(endpoint_, "/generate", generate_request(input, max_tokens), options_));
}

HttpScoreOracle::HttpScoreOracle(Endpoint endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

std::vector<double> HttpScoreOracle::score(std::string_view prompt,
                                           const std::vector<std::string>& continuations) {
  return parse_score_response(
      post_json(endpoint_, "/score", score_request(prompt, continuations), options_),
      continuations.size());
}

HttpClassifier::HttpClassifier(Endpoint endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

tags::TextClassifier::Label HttpClassifier::classify(std::string_view task,
                                                     std::string_view text) const {
  return parse_classify_response(
      post_json(endpoint_, "/classify", classify_request(task, text), options_));
}

}  // namespace chesscomm::backend
