// Command-line entry point; subcommands are wired in as the library grows.
#include <cstdio>

int main() {
  std::puts("ronin: subcommands not wired yet");
  return 1;
}
