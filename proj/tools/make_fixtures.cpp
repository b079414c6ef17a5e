#include <filesystem>
#include <fstream>
#include <iostream>

#include "cognav/scene.hpp"
#include "cognav/synth.hpp"

// Regenerates the bundled scene files. The committed copies under data/scenes
// must stay byte-identical to this output; the test suite checks that.
int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <out_dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create '" << dir.string() << "'\n";
    return 2;
  }
  for (int i = 1; i <= 3; ++i) {
    const cognav::SceneAnnotation scene = cognav::fixture_scene(i);
    const std::filesystem::path path = dir / (scene.scene_id + ".json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << cognav::serialize_scene(scene);
    if (!out.good()) {
      std::cerr << "error: cannot write '" << path.string() << "'\n";
      return 2;
    }
    std::cout << path.string() << "\n";
  }
  return 0;
}
