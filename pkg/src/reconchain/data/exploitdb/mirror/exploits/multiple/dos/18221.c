/*
 * Apache HTTP Server 2.x - 'Range' Header Remote Denial of Service
 * EDB-ID: 18221
 *
 * Compile: gcc -O2 -Wall -o range_dos 18221.c -lpthread
 *
 * Offline fixture. Placeholder body: the original proof-of-concept code is not included.
 */
#include <stdio.h>

int main(void)
{
    puts("placeholder");
    return 0;
}
