#include <iostream>

int main() {
    std::cout << "dhist: scenario runner (under construction)\n";
    return 0;
}
