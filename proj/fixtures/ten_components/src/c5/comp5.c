extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig6 = 0;
int sig15 = 0;
extern int sig5;

int act5() {
    return 5;
}

int poll5() {
    if (sig5 > 0) {
        act5();
    }
    return 0;
}

int send6() {
    if (FB) {
        sig6 = sig6 + 1;
    }
    return 0;
}

int send15() {
    if (FA && !FB) {
        sig15 = sig15 + 1;
    }
    return 0;
}
