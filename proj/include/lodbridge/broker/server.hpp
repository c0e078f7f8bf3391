// Copyright 2026 The lodbridge Authors
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

#pragma once

#include <memory>
#include <string>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/common/http.hpp"

namespace lodbridge::broker {

/// NGSI-LD HTTP subset in front of a Broker.
class BrokerServer {
 public:
  BrokerServer(Broker& broker, const entity::TemplateRegistry* templates = nullptr);

  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  std::string base_url() const { return server_.base_url(); }

 private:
  void install_routes();

  Broker& broker_;
  const entity::TemplateRegistry* templates_;
  http::Server server_;
};

}  // namespace lodbridge::broker
