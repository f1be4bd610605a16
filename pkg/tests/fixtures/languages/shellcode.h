#ifndef SHELLCODE_H
#define SHELLCODE_H
static const char sc[] = "\x90\x90";
#endif
