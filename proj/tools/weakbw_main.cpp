#include <iostream>
int main() { std::cout << "weakbw\n"; return 0; }
