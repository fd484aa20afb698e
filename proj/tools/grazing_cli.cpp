#include "grazing/config.hpp"

int main(int argc, char** argv) {
  const grazing::CliOutcome o = grazing::parse_cli(argc, argv);
  if (!o.run) return o.exit_code;
  return grazing::execute(o.config);
}
