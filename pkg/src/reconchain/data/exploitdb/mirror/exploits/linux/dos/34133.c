/*
 * Apache 2.4.7 mod_status - Scoreboard Handling Race Condition
 * EDB-ID: 34133
 *
 * gcc -m32 -std=c99 34133.c -o mod_status_race
 *
 * Offline fixture. Placeholder body: the original proof-of-concept code is not included.
 */
#include <stdio.h>

int main(void)
{
    puts("placeholder");
    return 0;
}
