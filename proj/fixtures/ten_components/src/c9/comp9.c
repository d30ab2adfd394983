extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig10 = 0;
extern int sig9;
extern int sig15;

int act9() {
    return 9;
}

int poll9() {
    if (sig9 > 0) {
        act9();
    }
    return 0;
}

int send10() {
    if (FA && FE) {
        sig10 = sig10 + 1;
    }
    return 0;
}

int act15() {
    return 15;
}

int poll15() {
    if (FC && FD) {
        if (sig15 > 0) {
            act15();
        }
    }
    return 0;
}
