#!/usr/bin/env python
# Exploit Title: vsftpd 2.3.4 - Backdoor Command Execution
# EDB-ID: 49757
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
