#!/usr/bin/env python
# Exploit Title: Apache mod_cgi - 'Shellshock' Remote Command Injection
# EDB-ID: 34900
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
