// build: `g++ spray.cpp -o spray -lpthread` then run ./spray
#include <thread>
int main() { return 0; }
