#!/usr/bin/env python
# Exploit Title: ProFTPd 1.3.5 - 'mod_copy' Remote Command Execution
# EDB-ID: 36803
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
