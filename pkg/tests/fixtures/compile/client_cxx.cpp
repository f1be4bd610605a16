// g++ -std=c++11 -O2 client.cpp -o client
#include <iostream>
int main() { std::cout << 1; }
