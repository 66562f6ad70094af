// HTTP server for the /v1 API.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tiltmut/http.hpp"

int main(int argc, char** argv) {
  CLI::App app{"JSON service for right tilting mutation"};
  std::string host = "127.0.0.1";
  int port = 8080;
  tiltmut::ServiceOptions opt;
  if (const char* env = std::getenv("TILTMUT_PORT")) port = std::atoi(env);
  if (const char* env = std::getenv("TILTMUT_MAX_CAP")) opt.max_cap = std::atoi(env);
  app.add_option("--host", host);
  app.add_option("--port", port)->check(CLI::Range(1, 65535));
  app.add_option("--max-cap", opt.max_cap, "Largest degreeCap a request may ask for")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-body", opt.max_body, "Request size limit in bytes");
  CLI11_PARSE(app, argc, argv);
  opt.default_cap = std::min(opt.default_cap, opt.max_cap);

  tiltmut::Service service(opt);
  httplib::Server server;
  service.install(server);
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.listen(host, port)) {
    std::cerr << "cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
