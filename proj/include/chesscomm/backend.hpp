#pragma once

// Clients for the generation, score and classifier endpoints.
//
// Wire contracts (JSON over HTTP, see docs/schemas):
//   POST /generate  {"input": str, "max_tokens": int}       -> {"text": str}
//   POST /score     {"prompt": str, "continuations": [str]} -> {"logprobs": [float]}
//   POST /classify  {"task": str, "text": str}              -> {"label": str, "confidence": float}
//   GET  /health                                            -> {"status": "ready"}

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/error.hpp"
#include "chesscomm/tags.hpp"

namespace chesscomm::backend {

class BackendError : public Error {
 public:
  using Error::Error;
};
class BackendUnreachable : public BackendError {
 public:
  using BackendError::BackendError;
};
class BackendTimeout : public BackendError {
 public:
  using BackendError::BackendError;
};
class MalformedResponse : public BackendError {
 public:
  using BackendError::BackendError;
};
class NonFiniteScore : public BackendError {
 public:
  using BackendError::BackendError;
};

// "http://host:port[/prefix]" or "unix:/path/to.sock[#/prefix]".
struct Endpoint {
  std::string host;  // socket path for unix endpoints
  int port = 80;
  bool unix_socket = false;
  std::string prefix;  // prepended to every route, no trailing slash

  // Throws Error on anything else (https is not supported).
  static Endpoint parse(std::string_view url);
  std::string describe() const;
};

struct HttpOptions {
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds read_timeout{30000};
  int retries = 0;  // extra attempts after BackendUnreachable / BackendTimeout
};

// ---- payloads -----------------------------------------------------------
// Pure request builders and response parsers; the parsers throw
// MalformedResponse (and NonFiniteScore for scores).

std::string generate_request(std::string_view input, int max_tokens);
std::string parse_generate_response(std::string_view body);

std::string score_request(std::string_view prompt, const std::vector<std::string>& continuations);
std::vector<double> parse_score_response(std::string_view body, std::size_t expected);

std::string classify_request(std::string_view task, std::string_view text);
tags::TextClassifier::Label parse_classify_response(std::string_view body);

// ---- interfaces ---------------------------------------------------------

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string generate(std::string_view input, int max_tokens) = 0;
};

// Log-probability of each continuation given the prompt, same order.
class ScoreOracle {
 public:
  virtual ~ScoreOracle() = default;
  virtual std::vector<double> score(std::string_view prompt,
                                    const std::vector<std::string>& continuations) = 0;
};

// ---- HTTP ---------------------------------------------------------------

class HttpGenerationBackend : public GenerationBackend {
 public:
  HttpGenerationBackend(Endpoint endpoint, HttpOptions options = {});
  std::string generate(std::string_view input, int max_tokens) override;

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

class HttpScoreOracle : public ScoreOracle {
 public:
  HttpScoreOracle(Endpoint endpoint, HttpOptions options = {});
  std::vector<double> score(std::string_view prompt,
                            const std::vector<std::string>& continuations) override;

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

class HttpClassifier : public tags::TextClassifier {
 public:
  HttpClassifier(Endpoint endpoint, HttpOptions options = {});
  Label classify(std::string_view task, std::string_view text) const override;

 private:
  Endpoint endpoint_;
  HttpOptions options_;
};

// True when GET /health answers {"status": "ready"}. Never throws.
bool backend_ready(const Endpoint& endpoint, const HttpOptions& options = {});

// POST `body` to `route` and return the response body. 200 only; 503 is
// reported as BackendUnreachable, other statuses as MalformedResponse.
std::string post_json(const Endpoint& endpoint, std::string_view route, const std::string& body,
                      const HttpOptions& options);

}  // namespace chesscomm::backend
