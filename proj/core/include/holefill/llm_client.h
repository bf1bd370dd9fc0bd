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

// Chat-completions client.
//
// Request body:
//   {"model": ..., "messages": [{"role": "user", "content": <prompt>}],
//    "temperature": ..., "max_tokens": ...}
// The reply text is choices[0].message.content.

#ifndef HOLEFILL_LLM_CLIENT_H_
#define HOLEFILL_LLM_CLIENT_H_

#include <chrono>
#include <string>
#include <string_view>

#include "holefill/errors.h"

namespace holefill {

struct Decoding {
  double temperature = 0.0;
  int max_tokens = 512;
};

struct ChatRequest {
  std::string model;
  std::string prompt;
  Decoding decoding;
};

// HTTP 429 or 503: the caller should back off before retrying.
class RateLimited : public TransportError {
 public:
  using TransportError::TransportError;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the model's reply text. Throws TransportError (or RateLimited).
  // Implementations must be safe to call from several threads at once.
  virtual std::string Complete(const ChatRequest& request) = 0;
};

struct Endpoint {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string path;              // e.g. "/v1/chat/completions"
};

// Throws InvalidArgument for anything but http(s)://host[:port][/path].
Endpoint ParseEndpoint(std::string_view url);

std::string BuildChatRequestBody(const ChatRequest& request);
// Throws TransportError when `body` is not a chat-completions reply.
std::string ExtractReplyContent(std::string_view body);

class HttpChatClient : public ChatClient {
 public:
  // An empty `api_key` sends no Authorization header.
  HttpChatClient(std::string_view endpoint_url, std::string api_key,
                 std::chrono::seconds timeout = std::chrono::seconds(120));

  std::string Complete(const ChatRequest& request) override;

 private:
  Endpoint endpoint_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

}  // namespace holefill

#endif  // HOLEFILL_LLM_CLIENT_H_
