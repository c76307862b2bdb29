// Serves a scripted chat-completions endpoint, e.g.
//   ufd-mock-llm --script data/mock_llm_script.json --port 8089
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mock_llm_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scripted chat-completions mock server"};
  std::string script_path;
  std::string host = "127.0.0.1";
  int port = 8089;
  app.add_option("--script", script_path, "Script JSON file")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(script_path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    ufd::mock::MockLlmServer server(ufd::mock::Script::parse(ss.str()));
    std::cerr << "mock LLM listening on http://" << host << ":" << port << "\n";
    return server.listen_blocking(host, port) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
