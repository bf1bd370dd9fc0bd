// Copyright 2026 The Holefill Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "holefill/llm_client.h"

#include <httplib.h>
#include <json.hpp>

namespace holefill {

using json = nlohmann::json;

Endpoint ParseEndpoint(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw InvalidArgument("endpoint must start with http:// or https://");
  }
  std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw InvalidArgument("unsupported endpoint scheme '" + std::string(scheme) + "'");
  }
  std::size_t host_begin = scheme_end + 3;
  std::size_t path_begin = url.find('/', host_begin);
  std::string_view host = url.substr(
      host_begin, path_begin == std::string_view::npos ? std::string_view::npos
                                                       : path_begin - host_begin);
  if (host.empty()) throw InvalidArgument("endpoint has no host");
  Endpoint endpoint;
  endpoint.scheme_host_port = std::string(url.substr(0, host_begin)) + std::string(host);
  endpoint.path = path_begin == std::string_view::npos
                      ? "/"
                      : std::string(url.substr(path_begin));
  return endpoint;
}

std::string BuildChatRequestBody(const ChatRequest& request) {
  json body = {
      {"model", request.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.decoding.temperature},
      {"max_tokens", request.decoding.max_tokens},
  };
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string ExtractReplyContent(std::string_view body) {
  try {
    json reply = json::parse(body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("unexpected chat-completions reply: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(std::string_view endpoint_url, std::string api_key,
                               std::chrono::seconds timeout)
    : endpoint_(ParseEndpoint(endpoint_url)),
      api_key_(std::move(api_key)),
      timeout_(timeout) {}

std::string HttpChatClient::Complete(const ChatRequest& request) {
  // One client per call: httplib::Client is not meant for concurrent use.
  httplib::Client client(endpoint_.scheme_host_port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto result = client.Post(endpoint_.path, headers, BuildChatRequestBody(request),
                            "application/json");
  if (!result) {
    throw TransportError("request to " + endpoint_.scheme_host_port + " failed: " +
                         httplib::to_string(result.error()));
  }
  if (result->status == 429 || result->status == 503) {
    throw RateLimited("endpoint answered HTTP " + std::to_string(result->status));
  }
  if (result->status < 200 || result->status >= 300) {
    throw TransportError("endpoint answered HTTP " + std::to_string(result->status));
  }
  return ExtractReplyContent(result->body);
}

}  // namespace holefill
