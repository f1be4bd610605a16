/*
 * Linux Kernel 2.6.22 < 3.9 - 'Dirty COW' 'PTRACE_POKEDATA' Race Condition Privilege Escalation (/etc/passwd Method)
 * EDB-ID: 40839
 *
 * Compile with: gcc -pthread 40839.c -o dirty -lcrypt
 *
 * Offline fixture. Placeholder body: the original proof-of-concept code is not included.
 */
#include <stdio.h>

int main(void)
{
    puts("placeholder");
    return 0;
}
