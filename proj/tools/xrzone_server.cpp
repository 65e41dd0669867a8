// Copyright 2026 The xrzone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <csignal>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "xrzone/cli.hpp"
#include "xrzone/http_server.hpp"

namespace {

httplib::Server* g_server = nullptr;

void stop(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrzone HTTP service"};
  std::string config_path, catalog_path, host;
  int port = 0;
  app.add_option("--config", config_path, "engine config file");
  app.add_option("--catalog", catalog_path, "application catalog (JSON array)")->required();
  app.add_option("--host", host, "bind address (overrides config)");
  app.add_option("--port", port, "bind port (overrides config)");
  CLI11_PARSE(app, argc, argv);

  try {
    xrzone::EngineConfig config;
    std::filesystem::path base;
    if (!config_path.empty()) {
      const xrzone::Json c = xrzone::parse_json(xrzone::cli::read_file(config_path));
      config = xrzone::config_from_json(c.contains("body") ? c["body"] : c, "config");
      base = std::filesystem::path(config_path).parent_path();
    }
    xrzone::apply_environment(config);
    if (!host.empty()) config.bind_host = host;
    if (port != 0) config.bind_port = port;
    const auto catalog =
        xrzone::catalog_from_json(xrzone::parse_json(xrzone::cli::read_file(catalog_path)), "catalog");

    std::shared_ptr<xrzone::LanguageModelProvider> provider;
    if (!config.provider.endpoint.empty())
      provider = std::make_shared<xrzone::HttpProvider>(config.provider);
    else if (!config.mock_fixtures.empty())
      provider = xrzone::MockProvider::from_file((base / config.mock_fixtures).string());

    xrzone::Service service(config, catalog, provider);
    httplib::Server server;
    xrzone::bind_routes(server, service);
    g_server = &server;
    std::signal(SIGINT, stop);
    std::signal(SIGTERM, stop);
    std::cerr << "xrzone: listening on " << config.bind_host << ":" << config.bind_port << " (provider "
              << (provider ? provider->name() : "none") << ")\n";
    if (!server.listen(config.bind_host, config.bind_port)) {
      std::cerr << "xrzone: cannot bind " << config.bind_host << ":" << config.bind_port << "\n";
      return 2;
    }
    return 0;
  } catch (const xrzone::cli::InputError& e) {
    std::cerr << "xrzone: " << e.what() << "\n";
    return 2;
  } catch (const xrzone::Error& e) {
    std::cerr << "xrzone: " << e.what() << "\n";
    return 2;
  }
}
